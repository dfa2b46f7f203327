//! Files and data preparation: sinogram and image containers on disk, raw
//! CSV ingestion, normalization, radial downsampling, graymap rendering and
//! phantom definitions.
//!
//! Container layout: a text header of `key value` lines ending in `data`,
//! followed by either CSV rows or a little-endian `f64` block.
//!
//! ```text
//! MRT-SINOGRAM 1
//! M 360
//! K 1958
//! T 0.0005107252298263534
//! lambda 0.015
//! delta 0.00075
//! encoding f64le
//! data
//! ```
//!
//! Images use the magic `MRT-IMAGE 1` with `width` and `height` keys. Rows
//! are stored bottom to top, i.e. row `j` holds `y_j`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_finite, Image, ModuloSinogram, SamplingGrid, Sinogram};
use crate::phantom::Phantom;

const SINOGRAM_MAGIC: &str = "MRT-SINOGRAM 1";
const IMAGE_MAGIC: &str = "MRT-IMAGE 1";

/// Payload encoding of a container file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Csv,
    #[default]
    F64le,
}

impl Encoding {
    fn name(self) -> &'static str {
        match self {
            Encoding::Csv => "csv",
            Encoding::F64le => "f64le",
        }
    }
}

/// Contents of a container file.
#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Sinogram(Sinogram),
    Modulo(ModuloSinogram),
    Image(Image),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Sinogram(_) => "sinogram",
            Document::Modulo(_) => "modulo sinogram",
            Document::Image(_) => "image",
        }
    }

    pub fn data(&self) -> &Array2<f64> {
        match self {
            Document::Sinogram(s) => s.data(),
            Document::Modulo(m) => m.data(),
            Document::Image(i) => i.data(),
        }
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn encode(header: &str, data: &Array2<f64>, encoding: Encoding) -> Vec<u8> {
    let mut out = String::from(header);
    let _ = writeln!(out, "encoding {}", encoding.name());
    out.push_str("data\n");
    match encoding {
        Encoding::Csv => {
            for row in data.rows() {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out.into_bytes()
        }
        Encoding::F64le => {
            let mut bytes = out.into_bytes();
            bytes.reserve(data.len() * 8);
            for v in data.iter() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            bytes
        }
    }
}

fn grid_header(grid: &SamplingGrid) -> String {
    format!(
        "{SINOGRAM_MAGIC}\nM {}\nK {}\nT {}\n",
        grid.angles(),
        grid.half_count(),
        grid.spacing()
    )
}

pub fn save_sinogram(path: &Path, s: &Sinogram, encoding: Encoding) -> Result<()> {
    write_atomic(path, &encode(&grid_header(s.grid()), s.data(), encoding))
}

pub fn save_modulo_sinogram(path: &Path, mp: &ModuloSinogram, encoding: Encoding) -> Result<()> {
    let header = format!("{}lambda {}\ndelta {}\n", grid_header(mp.grid()), mp.lambda(), mp.delta());
    write_atomic(path, &encode(&header, mp.data(), encoding))
}

pub fn save_image(path: &Path, img: &Image, encoding: Encoding) -> Result<()> {
    let header = format!("{IMAGE_MAGIC}\nwidth {}\nheight {}\n", img.width(), img.height());
    write_atomic(path, &encode(&header, img.data(), encoding))
}

/// Reads any container file.
pub fn load_document(path: &Path) -> Result<Document> {
    let bytes = std::fs::read(path)?;
    parse_document(path, &bytes)
}

/// Reads a sinogram container; a `lambda` entry makes it a modulo sinogram.
pub fn load_sinogram(path: &Path) -> Result<Document> {
    match load_document(path)? {
        Document::Image(_) => Err(Error::parse(path, "expected a sinogram, found an image")),
        doc => Ok(doc),
    }
}

pub fn load_image(path: &Path) -> Result<Image> {
    match load_document(path)? {
        Document::Image(img) => Ok(img),
        other => Err(Error::parse(path, format!("expected an image, found a {}", other.kind()))),
    }
}

#[derive(Default)]
struct Header {
    angles: Option<usize>,
    half: Option<usize>,
    spacing: Option<f64>,
    lambda: Option<f64>,
    delta: Option<f64>,
    width: Option<usize>,
    height: Option<usize>,
    encoding: Option<Encoding>,
}

fn parse_document(path: &Path, bytes: &[u8]) -> Result<Document> {
    let err = |reason: String| Error::parse(path, reason);
    let mut pos = 0;
    let mut next_line = || -> Option<&[u8]> {
        if pos >= bytes.len() {
            return None;
        }
        let end = bytes[pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |i| pos + i);
        let line = &bytes[pos..end];
        pos = end + 1;
        Some(line)
    };

    let magic = next_line().ok_or_else(|| err("empty file".into()))?;
    let magic = std::str::from_utf8(magic).map_err(|_| err("header is not UTF-8".into()))?.trim();
    let is_image = match magic {
        SINOGRAM_MAGIC => false,
        IMAGE_MAGIC => true,
        other => return Err(err(format!("unrecognized magic line `{other}`"))),
    };

    let mut h = Header::default();
    let mut header_line = 1;
    loop {
        header_line += 1;
        let line = next_line().ok_or_else(|| err("header ends without a `data` line".into()))?;
        let line = std::str::from_utf8(line)
            .map_err(|_| err(format!("header line {header_line} is not UTF-8")))?
            .trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "data" {
            break;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(format!("header line {header_line}: expected `key value`, got `{line}`")))?;
        let value = value.trim();
        let bad = |what: &str| err(format!("header line {header_line}: invalid {what} `{value}`"));
        match key {
            "M" => h.angles = Some(value.parse().map_err(|_| bad("M"))?),
            "K" => h.half = Some(value.parse().map_err(|_| bad("K"))?),
            "T" => h.spacing = Some(value.parse().map_err(|_| bad("T"))?),
            "lambda" => h.lambda = Some(value.parse().map_err(|_| bad("lambda"))?),
            "delta" => h.delta = Some(value.parse().map_err(|_| bad("delta"))?),
            "width" => h.width = Some(value.parse().map_err(|_| bad("width"))?),
            "height" => h.height = Some(value.parse().map_err(|_| bad("height"))?),
            "encoding" => {
                h.encoding = Some(match value {
                    "csv" => Encoding::Csv,
                    "f64le" => Encoding::F64le,
                    _ => return Err(bad("encoding")),
                })
            }
            other => return Err(err(format!("header line {header_line}: unknown key `{other}`"))),
        }
    }
    let payload = &bytes[pos.min(bytes.len())..];
    let encoding = h.encoding.ok_or_else(|| err("header lacks `encoding`".into()))?;

    if is_image {
        let w = h.width.ok_or_else(|| err("header lacks `width`".into()))?;
        let hgt = h.height.ok_or_else(|| err("header lacks `height`".into()))?;
        let data = decode(path, payload, (hgt, w), encoding)?;
        return Image::new(data).map(Document::Image);
    }

    let m = h.angles.ok_or_else(|| err("header lacks `M`".into()))?;
    let k = h.half.ok_or_else(|| err("header lacks `K`".into()))?;
    let t = h.spacing.ok_or_else(|| err("header lacks `T`".into()))?;
    let grid = SamplingGrid::new(m, k, t)?;
    let data = decode(path, payload, grid.shape(), encoding)?;
    let s = Sinogram::new(grid, data)?;
    match (h.lambda, h.delta) {
        (Some(lambda), delta) => ModuloSinogram::new(s, lambda, delta.unwrap_or(0.0)).map(Document::Modulo),
        (None, Some(_)) => Err(err("`delta` given without `lambda`".into())),
        (None, None) => Ok(Document::Sinogram(s)),
    }
}

fn decode(path: &Path, payload: &[u8], shape: (usize, usize), encoding: Encoding) -> Result<Array2<f64>> {
    let (rows, cols) = shape;
    let data = match encoding {
        Encoding::F64le => {
            if payload.len() != rows * cols * 8 {
                let complete = payload.len() / (cols * 8).max(1);
                return Err(Error::parse(
                    path,
                    format!(
                        "binary payload holds {} bytes, expected {} ({rows}×{cols}); data row {complete} is incomplete or extra",
                        payload.len(),
                        rows * cols * 8
                    ),
                ));
            }
            let values = payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            Array2::from_shape_vec(shape, values).expect("length checked")
        }
        Encoding::Csv => {
            let text = std::str::from_utf8(payload).map_err(|_| Error::parse(path, "CSV payload is not UTF-8"))?;
            parse_csv_rows(path, text, Some(shape))?
        }
    };
    if let Err(Error::NonFinite { row, col }) = check_finite(&data) {
        return Err(Error::parse(path, format!("data row {row}, column {col} is not finite")));
    }
    Ok(data)
}

fn parse_csv_rows(path: &Path, text: &str, shape: Option<(usize, usize)>) -> Result<Array2<f64>> {
    let mut values = Vec::new();
    let mut cols = shape.map(|s| s.1);
    let mut rows = 0;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let before = values.len();
        for field in line.split([',', ';', ' ', '\t']).filter(|f| !f.is_empty()) {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(path, format!("data row {rows}: cannot parse `{field}`")))?;
            if !v.is_finite() {
                return Err(Error::parse(path, format!("data row {rows}: non-finite value `{field}`")));
            }
            values.push(v);
        }
        let found = values.len() - before;
        match cols {
            Some(c) if c != found => {
                return Err(Error::parse(path, format!("data row {rows}: expected {c} values, found {found}")));
            }
            None => cols = Some(found),
            _ => {}
        }
        rows += 1;
        if let Some((r, _)) = shape {
            if rows > r {
                return Err(Error::parse(path, format!("data row {rows}: header declares only {r} rows")));
            }
        }
    }
    if let Some((r, _)) = shape {
        if rows != r {
            return Err(Error::parse(path, format!("data row {rows}: missing, header declares {r} rows")));
        }
    }
    let cols = cols.unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(Error::parse(path, "no data rows"));
    }
    Ok(Array2::from_shape_vec((rows, cols), values).expect("row lengths checked"))
}

/// Reads a headerless CSV sinogram: one row per angle over `[0, π)`, an odd
/// number of radial samples per row. `T` defaults to `1/K`.
pub fn load_raw_csv(path: &Path, spacing: Option<f64>) -> Result<Sinogram> {
    let text = std::fs::read_to_string(path)?;
    let data = parse_csv_rows(path, &text, None)?;
    let (m, n) = data.dim();
    if n % 2 == 0 {
        return Err(Error::parse(path, format!("rows hold {n} radial samples; an odd count is required")));
    }
    let k = n / 2;
    if k == 0 {
        return Err(Error::parse(path, "rows need at least three radial samples"));
    }
    let grid = SamplingGrid::new(m, k, spacing.unwrap_or(1.0 / k as f64))?;
    Sinogram::new(grid, data)
}

/// Affine map of the entries onto `[0, 1]`.
pub fn normalize_sinogram(s: &Sinogram) -> Result<Sinogram> {
    let (lo, hi) = s
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi <= lo {
        return Err(Error::DegenerateRange(lo));
    }
    let scale = hi - lo;
    s.map(|v| ((v - lo) / scale).clamp(0.0, 1.0))
}

/// Keeps every `factor`-th radial sample, including the centre; the new grid
/// has `K' = K/factor` and `T' = factor·T`.
pub fn downsample_radial(s: &Sinogram, factor: usize) -> Result<Sinogram> {
    let g = s.grid();
    if factor == 0 || g.half_count() % factor != 0 {
        return Err(Error::invalid(
            "downsample",
            format!("factor {factor} must be positive and divide K = {}", g.half_count()),
        ));
    }
    if factor == 1 {
        return Ok(s.clone());
    }
    let grid = SamplingGrid::new(g.angles(), g.half_count() / factor, g.spacing() * factor as f64)?;
    let data = s.data().slice(ndarray::s![.., ..;factor]).to_owned();
    Sinogram::new(grid, data)
}

/// [`downsample_radial`] for folded data; `λ` and `δ` carry over.
pub fn downsample_modulo(mp: &ModuloSinogram, factor: usize) -> Result<ModuloSinogram> {
    ModuloSinogram::new(downsample_radial(mp.sinogram(), factor)?, mp.lambda(), mp.delta())
}

/// Encodes an image as a binary graymap (P5), top row at the largest `y`.
///
/// Values are mapped linearly from `window` (or the image's own min/max) to
/// 0..=255 and clamped. A degenerate automatic window renders mid-gray.
pub fn encode_pgm(img: &Image, window: Option<(f64, f64)>) -> Result<Vec<u8>> {
    let (lo, hi) = match window {
        Some((lo, hi)) if lo < hi => (lo, hi),
        Some((lo, hi)) => {
            return Err(Error::invalid("window", format!("need lo < hi, got ({lo}, {hi})")));
        }
        None => img
            .data()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
    };
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    for row in img.data().rows().into_iter().rev() {
        out.extend(row.iter().map(|&v| {
            if hi > lo {
                (255.0 * (v - lo) / (hi - lo)).round().clamp(0.0, 255.0) as u8
            } else {
                128
            }
        }));
    }
    Ok(out)
}

pub fn render_image(img: &Image, path: &Path, window: Option<(f64, f64)>) -> Result<()> {
    write_atomic(path, &encode_pgm(img, window)?)
}

/// Parses a phantom definition:
///
/// ```toml
/// [[component]]
/// kind = "ellipse"
/// center = [0.0, 0.0]
/// axes = [0.69, 0.92]
/// rotation = 0.0      # radians, optional
/// intensity = 1.0
///
/// [[component]]
/// kind = "bump"
/// center = [0.2, 0.1]
/// radius = 0.3
/// intensity = 0.5
/// nu = 2.5
/// ```
pub fn parse_phantom(path: &Path, text: &str) -> Result<Phantom> {
    let raw: Phantom = toml::from_str(text).map_err(|e| Error::parse(path, e.to_string()))?;
    Phantom::new(raw.components().to_vec())
}

pub fn load_phantom(path: &Path) -> Result<Phantom> {
    let text = std::fs::read_to_string(path)?;
    parse_phantom(path, &text)
}

pub fn save_phantom(path: &Path, phantom: &Phantom) -> Result<()> {
    let text = toml::to_string(phantom).map_err(|e| Error::invalid("phantom", e.to_string()))?;
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulo::{add_uniform_noise, fold_sinogram};
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sinogram(m: usize, k: usize, seed: u64) -> Sinogram {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = SamplingGrid::new(m, k, 1.0 / k as f64).unwrap();
        Sinogram::new(g, Array2::from_shape_fn(g.shape(), |_| rng.random_range(-1e3..1e3) * 1e-3)).unwrap()
    }

    #[test]
    fn sinogram_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let s = random_sinogram(7, 5, 1);
        for enc in [Encoding::Csv, Encoding::F64le] {
            let path = dir.path().join(format!("s.{}", enc.name()));
            save_sinogram(&path, &s, enc).unwrap();
            assert_eq!(load_sinogram(&path).unwrap(), Document::Sinogram(s.clone()));
        }
        let mp = add_uniform_noise(&fold_sinogram(&s, 0.1).unwrap(), 0.01, 3).unwrap();
        for enc in [Encoding::Csv, Encoding::F64le] {
            let path = dir.path().join("m");
            save_modulo_sinogram(&path, &mp, enc).unwrap();
            assert_eq!(load_sinogram(&path).unwrap(), Document::Modulo(mp.clone()));
        }
    }

    #[test]
    fn image_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::new(array![[1.5, -2.0, 0.1], [3.0, 1e-300, 7.25]]).unwrap();
        let path = dir.path().join("img");
        save_image(&path, &img, Encoding::Csv).unwrap();
        assert_eq!(load_image(&path).unwrap(), img);
        assert!(load_sinogram(&path).is_err());
    }

    #[test]
    fn walnut_shaped_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("walnut");
        let mut text = String::from("MRT-SINOGRAM 1\nM 600\nK 1128\nT 0.000886524822695035\nencoding csv\ndata\n");
        let row = vec!["0"; 2257].join(",");
        for _ in 0..600 {
            text.push_str(&row);
            text.push('\n');
        }
        std::fs::write(&path, text).unwrap();
        match load_sinogram(&path).unwrap() {
            Document::Sinogram(s) => assert_eq!(s.grid().shape(), (600, 2257)),
            other => panic!("unexpected {}", other.kind()),
        }
    }

    #[test]
    fn malformed_files_name_the_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad");
        let header = "MRT-SINOGRAM 1\nM 3\nK 1\nT 1\nencoding csv\ndata\n";

        std::fs::write(&path, format!("{header}1,2,3\n4,5\n7,8,9\n")).unwrap();
        let msg = load_sinogram(&path).unwrap_err().to_string();
        assert!(msg.contains("data row 1") && msg.contains("expected 3 values, found 2"), "{msg}");

        std::fs::write(&path, format!("{header}1,2,3\n4,5,6\n")).unwrap();
        assert!(load_sinogram(&path).unwrap_err().to_string().contains("data row 2"));

        std::fs::write(&path, format!("{header}1,2,3\n4,x,6\n7,8,9\n")).unwrap();
        assert!(load_sinogram(&path).unwrap_err().to_string().contains("data row 1"));

        std::fs::write(&path, format!("{header}1,2,3\n4,5,6\n7,8,NaN\n")).unwrap();
        assert!(load_sinogram(&path).unwrap_err().to_string().contains("data row 2"));

        std::fs::write(&path, "MRT-SINOGRAM 1\nM 3\nK 1\nencoding csv\ndata\n").unwrap();
        assert!(load_sinogram(&path).unwrap_err().to_string().contains("`T`"));

        std::fs::write(&path, "NOT A FILE\n").unwrap();
        assert!(matches!(load_sinogram(&path), Err(Error::Parse { .. })));

        let s = random_sinogram(2, 1, 4);
        save_sinogram(&path, &s, Encoding::F64le).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 8);
        std::fs::write(&path, bytes).unwrap();
        assert!(load_sinogram(&path).unwrap_err().to_string().contains("data row 1"));
    }

    #[test]
    fn raw_csv_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.csv");
        std::fs::write(&path, "0,1,2,1,0\n0,2,4,2,0\n").unwrap();
        let s = load_raw_csv(&path, None).unwrap();
        assert_eq!(s.grid().shape(), (2, 5));
        assert_eq!(s.grid().spacing(), 0.5);
        std::fs::write(&path, "0,1,2,1\n").unwrap();
        assert!(load_raw_csv(&path, None).is_err());
    }

    #[test]
    fn normalization() {
        let g = SamplingGrid::new(1, 1, 1.0).unwrap();
        let unit = Sinogram::new(g, array![[0.0, 0.5, 1.0]]).unwrap();
        assert_eq!(normalize_sinogram(&unit).unwrap(), unit);
        let wide = Sinogram::new(g, array![[-2.0, 1.0, 2.0]]).unwrap();
        assert_eq!(normalize_sinogram(&wide).unwrap().data(), &array![[0.0, 0.75, 1.0]]);
        let flat = Sinogram::new(g, array![[3.0, 3.0, 3.0]]).unwrap();
        assert!(matches!(normalize_sinogram(&flat), Err(Error::DegenerateRange(_))));
    }

    #[test]
    fn downsampling() {
        let g = SamplingGrid::new(1, 2, 0.5).unwrap();
        let s = Sinogram::new(g, array![[0.0, 1.0, 2.0, 3.0, 4.0]]).unwrap();
        assert_eq!(downsample_radial(&s, 1).unwrap(), s);
        let d = downsample_radial(&s, 2).unwrap();
        assert_eq!(d.data(), &array![[0.0, 2.0, 4.0]]);
        assert_eq!((d.grid().half_count(), d.grid().spacing()), (1, 1.0));
        assert!(downsample_radial(&s, 3).is_err());
        assert!(downsample_radial(&s, 0).is_err());

        let w = SamplingGrid::new(2, 1128, 1.0 / 1128.0).unwrap();
        let d = downsample_radial(&Sinogram::zeros(w), 2).unwrap();
        assert_eq!((d.grid().half_count(), d.grid().radial_count()), (564, 1129));
        for n in 0..d.grid().radial_count() {
            assert!((d.grid().radial(n) - w.radial(2 * n)).abs() < 1e-15);
        }

        let mp = fold_sinogram(&s, 1.5).unwrap();
        let dm = downsample_modulo(&mp, 2).unwrap();
        assert_eq!(dm.lambda(), 1.5);
        assert_eq!(dm.data().ncols(), 3);
    }

    #[test]
    fn graymap_encoding() {
        let img = Image::new(array![[0.0, 1.0]]).unwrap();
        let bytes = encode_pgm(&img, Some((0.0, 1.0))).unwrap();
        assert_eq!(bytes, b"P5\n2 1\n255\n\x00\xff".to_vec());

        let flat = Image::new(Array2::from_elem((3, 3), 2.0)).unwrap();
        let bytes = encode_pgm(&flat, None).unwrap();
        assert!(bytes.ends_with(&[128; 9]));
        assert!(encode_pgm(&flat, Some((1.0, 1.0))).is_err());

        // top row of the file is the largest y
        let tall = Image::new(array![[0.0], [1.0]]).unwrap();
        assert!(encode_pgm(&tall, None).unwrap().ends_with(&[255, 0]));

        let big = Image::zeros(512, 512);
        let header = b"P5\n512 512\n255\n".len();
        assert_eq!(encode_pgm(&big, None).unwrap().len(), header + 262_144);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.pgm");
        render_image(&img, &path, None).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), b"P5\n2 1\n255\n".len() + 2);
    }

    #[test]
    fn phantom_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.toml");
        save_phantom(&path, &Phantom::shepp_logan()).unwrap();
        assert_eq!(load_phantom(&path).unwrap(), Phantom::shepp_logan());
        save_phantom(&path, &Phantom::smooth()).unwrap();
        assert_eq!(load_phantom(&path).unwrap(), Phantom::smooth());

        let text = "[[component]]\nkind = \"bump\"\ncenter = [0.0, 0.0]\nradius = 0.5\nintensity = 2.0\nnu = 2.5\n\n\
                    [[component]]\nkind = \"ellipse\"\ncenter = [0.1, 0.0]\naxes = [0.2, 0.3]\nintensity = 1.0\n";
        let p = parse_phantom(Path::new("inline"), text).unwrap();
        assert_eq!(p.components().len(), 2);
        assert!((p.value([0.25, 0.0]) - 2.0 * 0.75f64.powf(2.5) - 1.0).abs() < 1e-12);

        let outside = "[[component]]\nkind = \"bump\"\ncenter = [0.5, 0.0]\nradius = 0.5\nintensity = 1.0\nnu = 2.5\n";
        assert!(parse_phantom(Path::new("inline"), outside).is_err());
        assert!(matches!(parse_phantom(Path::new("inline"), "[[component]]\nkind = \"square\"\n"), Err(Error::Parse { .. })));
    }
}
