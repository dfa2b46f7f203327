//! End-to-end runs: phantom or measured data, folding and noise, unfolding,
//! reconstruction and metrics.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::grid::{Image, ModuloSinogram, SamplingGrid, Sinogram};
use crate::io::{self, Document, Encoding};
use crate::lmu::{improve, lmu_unfold};
use crate::metrics::{max_abs_err, relative_l2_error, snr_db, ssim};
use crate::modulo::{add_uniform_noise, compression_factor, fold_sinogram};
use crate::phantom::Phantom;
use crate::radon::{fbp_reconstruct, FilterSpec, Window};
use crate::usfbp::us_unfold;

/// Unfolding stage applied to folded data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unfolding {
    #[serde(rename = "lmu")]
    Lmu,
    #[serde(rename = "lmu+")]
    LmuPlus,
    #[serde(rename = "us")]
    Us,
}

impl Unfolding {
    pub fn name(self) -> &'static str {
        match self {
            Unfolding::Lmu => "lmu",
            Unfolding::LmuPlus => "lmu+",
            Unfolding::Us => "us",
        }
    }

    pub fn apply(self, mp: &ModuloSinogram) -> Result<Sinogram> {
        match self {
            Unfolding::Lmu => lmu_unfold(mp),
            Unfolding::LmuPlus => improve(&lmu_unfold(mp)?, mp),
            Unfolding::Us => us_unfold(mp, 1),
        }
    }
}

impl FromStr for Unfolding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lmu" => Ok(Unfolding::Lmu),
            "lmu+" => Ok(Unfolding::LmuPlus),
            "us" => Ok(Unfolding::Us),
            other => Err(Error::invalid("unfold", format!("unknown method `{other}` (lmu, lmu+, us)"))),
        }
    }
}

/// Reconstruction pipeline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Classical FBP of the unfolded data, no detector saturation.
    #[serde(rename = "fbp")]
    Fbp,
    #[default]
    #[serde(rename = "lmu-fbp")]
    LmuFbp,
    #[serde(rename = "lmu+-fbp")]
    LmuPlusFbp,
    #[serde(rename = "us-fbp")]
    UsFbp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fbp => "fbp",
            Method::LmuFbp => "lmu-fbp",
            Method::LmuPlusFbp => "lmu+-fbp",
            Method::UsFbp => "us-fbp",
        }
    }

    pub fn unfolding(self) -> Option<Unfolding> {
        match self {
            Method::Fbp => None,
            Method::LmuFbp => Some(Unfolding::Lmu),
            Method::LmuPlusFbp => Some(Unfolding::LmuPlus),
            Method::UsFbp => Some(Unfolding::Us),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fbp" => Ok(Method::Fbp),
            "lmu-fbp" => Ok(Method::LmuFbp),
            "lmu+-fbp" => Ok(Method::LmuPlusFbp),
            "us-fbp" => Ok(Method::UsFbp),
            other => Err(Error::invalid(
                "method",
                format!("unknown method `{other}` (fbp, lmu-fbp, lmu+-fbp, us-fbp)"),
            )),
        }
    }
}

/// Resolves a built-in phantom name (`smooth`, `shepp-logan`, `zero`) or
/// reads a phantom file.
pub fn resolve_phantom(name: &str) -> Result<Phantom> {
    match name.to_ascii_lowercase().as_str() {
        "smooth" => Ok(Phantom::smooth()),
        "shepp-logan" | "shepplogan" | "shepp_logan" => Ok(Phantom::shepp_logan()),
        "zero" | "empty" => Ok(Phantom::empty()),
        _ => io::load_phantom(Path::new(name)),
    }
}

/// Experiment parameters. Defaults reproduce the smooth-phantom run on the
/// 360 × 3917 grid with `λ = 0.015`, `δ = 0.05λ`, cosine filter and `L = M`.
///
/// Loaded from TOML with the same field names; absent fields keep defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Built-in name or phantom file. Mutually exclusive with `sinogram`.
    pub phantom: Option<String>,
    /// Container file or headerless CSV with measured data.
    pub sinogram: Option<PathBuf>,
    #[serde(rename = "M")]
    pub angles: usize,
    #[serde(rename = "K")]
    pub half_count: usize,
    /// Radial spacing; `1/K` when absent.
    #[serde(rename = "T")]
    pub spacing: Option<f64>,
    pub lambda: f64,
    /// Noise bound; `0.05·λ` for synthetic data and 0 for loaded folded data
    /// when absent.
    pub delta: Option<f64>,
    pub seed: u64,
    pub filter: Window,
    /// Filter bandwidth; `M` when absent.
    pub bandwidth: Option<f64>,
    pub method: Method,
    pub width: usize,
    pub height: usize,
    pub downsample: usize,
    /// Map loaded unfolded data onto `[0, 1]` before folding.
    pub normalize: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            phantom: Some("smooth".into()),
            sinogram: None,
            angles: 360,
            half_count: 1958,
            spacing: None,
            lambda: 0.015,
            delta: None,
            seed: 0,
            filter: Window::Cosine,
            bandwidth: None,
            method: Method::LmuFbp,
            width: 512,
            height: 512,
            downsample: 1,
            normalize: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(path: &Path, text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse(path, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(path, &std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::invalid("config", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.phantom, &self.sinogram) {
            (Some(_), Some(_)) => return Err(Error::invalid("source", "set either a phantom or a sinogram, not both")),
            (None, None) => return Err(Error::invalid("source", "a phantom or a sinogram is required")),
            _ => {}
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid("lambda", format!("must be positive, got {}", self.lambda)));
        }
        if let Some(d) = self.delta {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::invalid("delta", format!("must be nonnegative, got {d}")));
            }
        }
        if let Some(l) = self.bandwidth {
            FilterSpec::new(self.filter, l)?;
        }
        if ![1, 2, 4].contains(&self.downsample) {
            return Err(Error::invalid("downsample", format!("factor must be 1, 2 or 4, got {}", self.downsample)));
        }
        if self.phantom.is_some() {
            self.grid()?;
            if self.half_count % self.downsample != 0 {
                return Err(Error::invalid(
                    "downsample",
                    format!("factor {} does not divide K = {}", self.downsample, self.half_count),
                ));
            }
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("size", "image dimensions must be positive"));
        }
        Ok(())
    }

    /// Grid for synthetic data.
    pub fn grid(&self) -> Result<SamplingGrid> {
        if self.half_count == 0 {
            return Err(Error::invalid("K", "must be positive"));
        }
        SamplingGrid::new(
            self.angles,
            self.half_count,
            self.spacing.unwrap_or(1.0 / self.half_count as f64),
        )
    }

    fn filter_for(&self, grid: &SamplingGrid) -> Result<FilterSpec> {
        FilterSpec::new(self.filter, self.bandwidth.unwrap_or(grid.angles() as f64))
    }
}

/// Scalar summary of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRecord {
    entries: Vec<(&'static str, Field)>,
}

#[derive(Clone, Debug, PartialEq)]
enum Field {
    Text(String),
    Int(u64),
    Real(f64),
}

impl MetricsRecord {
    fn new() -> Self {
        Self { entries: Vec::new() }
    }

    fn text(&mut self, key: &'static str, v: impl Into<String>) {
        self.entries.push((key, Field::Text(v.into())));
    }

    fn int(&mut self, key: &'static str, v: u64) {
        self.entries.push((key, Field::Int(v)));
    }

    fn real(&mut self, key: &'static str, v: Option<f64>) {
        if let Some(v) = v {
            self.entries.push((key, Field::Real(v)));
        }
    }

    /// Numeric entry by key.
    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| *k == key).and_then(|(_, v)| match v {
            Field::Real(x) => Some(*x),
            Field::Int(x) => Some(*x as f64),
            Field::Text(_) => None,
        })
    }

    /// `key=value` lines; reals use the shortest round-trip representation
    /// and infinity prints as `inf`.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let value = match v {
                Field::Text(s) => s.clone(),
                Field::Int(i) => i.to_string(),
                Field::Real(x) => x.to_string(),
            };
            out.push_str(&format!("{k}={value}\n"));
        }
        out
    }

    /// JSON object; non-finite reals are written as strings.
    pub fn to_json(&self) -> String {
        let mut map = Map::new();
        for (k, v) in &self.entries {
            let value = match v {
                Field::Text(s) => Value::String(s.clone()),
                Field::Int(i) => Value::from(*i),
                Field::Real(x) => serde_json::Number::from_f64(*x)
                    .map(Value::Number)
                    .unwrap_or_else(|| Value::String(x.to_string())),
            };
            map.insert((*k).to_string(), value);
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("plain JSON values");
        text.push('\n');
        text
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    /// Rasterized phantom, when the source is analytic.
    pub truth: Option<Image>,
    /// Unfolded data after downsampling, when known.
    pub exact: Option<Sinogram>,
    /// Noiseless folded data after downsampling.
    pub folded: Option<ModuloSinogram>,
    /// Data handed to the unfolding stage.
    pub noisy: Option<ModuloSinogram>,
    /// Data handed to the reconstruction stage.
    pub unfolded: Sinogram,
    pub reconstruction: Image,
    pub metrics: MetricsRecord,
}

enum Input {
    Exact(Sinogram),
    Folded(ModuloSinogram),
}

fn load_input(cfg: &ExperimentConfig, path: &Path) -> Result<Input> {
    let mut head = [0u8; 4];
    let is_container = {
        use std::io::Read;
        let mut f = std::fs::File::open(path)?;
        f.read(&mut head)? == 4 && &head == b"MRT-"
    };
    let input = if is_container {
        match io::load_sinogram(path)? {
            Document::Sinogram(s) => Input::Exact(s),
            Document::Modulo(mp) => Input::Folded(mp),
            Document::Image(_) => unreachable!("load_sinogram rejects images"),
        }
    } else {
        Input::Exact(io::load_raw_csv(path, cfg.spacing)?)
    };
    match input {
        Input::Exact(s) if cfg.normalize => Ok(Input::Exact(io::normalize_sinogram(&s)?)),
        Input::Folded(_) if cfg.normalize => Err(Error::invalid("normalize", "folded data cannot be normalized")),
        other => Ok(other),
    }
}

/// Runs the configured pipeline. Deterministic for a fixed config, including
/// across thread counts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let stage = |name: &'static str| move |e: Error| e.at_stage(name);

    let (truth, input, source) = match (&cfg.phantom, &cfg.sinogram) {
        (Some(name), _) => {
            let phantom = resolve_phantom(name).map_err(stage("phantom"))?;
            let grid = cfg.grid().map_err(stage("phantom"))?;
            let truth = phantom.rasterize(cfg.width, cfg.height);
            (Some(truth), Input::Exact(phantom.sinogram(&grid)), name.clone())
        }
        (None, Some(path)) => {
            let input = load_input(cfg, path).map_err(stage("load"))?;
            (None, input, path.display().to_string())
        }
        (None, None) => unreachable!("validated"),
    };

    let mut record = MetricsRecord::new();
    record.text("source", source);
    record.text("method", cfg.method.name());

    let (exact, folded, noisy) = match input {
        Input::Exact(p) => {
            if cfg.method == Method::Fbp {
                (Some(p), None, None)
            } else {
                let folded = fold_sinogram(&p, cfg.lambda).map_err(stage("fold"))?;
                let delta = cfg.delta.unwrap_or(0.05 * cfg.lambda);
                let noisy = add_uniform_noise(&folded, delta, cfg.seed).map_err(stage("noise"))?;
                (Some(p), Some(folded), Some(noisy))
            }
        }
        Input::Folded(mp) => {
            let noisy = match cfg.delta {
                Some(d) if d > 0.0 => Some(add_uniform_noise(&mp, d, cfg.seed).map_err(stage("noise"))?),
                _ => None,
            };
            let noisy = noisy.unwrap_or_else(|| mp.clone());
            (None, Some(mp), Some(noisy))
        }
    };

    let factor = cfg.downsample;
    let exact = exact
        .map(|p| io::downsample_radial(&p, factor))
        .transpose()
        .map_err(stage("downsample"))?;
    let folded = folded
        .map(|m| io::downsample_modulo(&m, factor))
        .transpose()
        .map_err(stage("downsample"))?;
    let noisy = noisy
        .map(|m| io::downsample_modulo(&m, factor))
        .transpose()
        .map_err(stage("downsample"))?;

    let grid = match (&exact, &noisy) {
        (_, Some(n)) => *n.grid(),
        (Some(p), None) => *p.grid(),
        (None, None) => unreachable!("some data is always present"),
    };
    let filter = cfg.filter_for(&grid).map_err(stage("reconstruct"))?;
    record.int("M", grid.angles() as u64);
    record.int("K", grid.half_count() as u64);
    record.real("T", Some(grid.spacing()));
    record.real("lambda", noisy.as_ref().map(|n| n.lambda()));
    record.real("delta", noisy.as_ref().map(|n| n.delta()));
    record.int("seed", cfg.seed);
    record.text("filter", filter.window.name());
    record.real("bandwidth", Some(filter.bandwidth));
    record.int("downsample", factor as u64);
    record.int("width", cfg.width as u64);
    record.int("height", cfg.height as u64);

    let unfolded = match (cfg.method.unfolding(), &noisy, &exact) {
        (Some(u), Some(n), _) => u.apply(n).map_err(stage("unfold"))?,
        (None, Some(n), _) => n.sinogram().clone(),
        (None, None, Some(p)) => p.clone(),
        (Some(_), None, _) | (None, None, None) => unreachable!("folded data exists for unfolding methods"),
    };
    let reconstruction =
        fbp_reconstruct(&unfolded, &filter, cfg.width, cfg.height).map_err(stage("reconstruct"))?;

    let metric = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedMetric(_)) => Ok(None),
        Err(e) => Err(e.at_stage("metrics")),
    };
    if let (Some(p), Some(n)) = (&exact, &noisy) {
        record.real("compression_factor", Some(compression_factor(p, n.lambda())));
    }
    if let (Some(f), Some(n)) = (&folded, &noisy) {
        record.real("snr_db", metric(snr_db(f.data(), n.data()))?);
    }
    if let Some(p) = &exact {
        record.real("unfold_max_abs_err", Some(max_abs_err(unfolded.data(), p.data()).map_err(stage("metrics"))?));
    }
    if let Some(t) = &truth {
        record.real("ssim", Some(ssim(&reconstruction, t).map_err(stage("metrics"))?));
        record.real("relative_l2_error", metric(relative_l2_error(reconstruction.data(), t.data()))?);
    }

    Ok(ExperimentOutput {
        truth,
        exact,
        folded,
        noisy,
        unfolded,
        reconstruction,
        metrics: record,
    })
}

impl ExperimentOutput {
    /// Writes rasters, graymaps, sinogram containers and both metrics files
    /// into `dir`. Returns the written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut push = |name: &str| {
            let p = dir.join(name);
            written.push(p.clone());
            p
        };
        let window = self.truth.as_ref().and_then(|t| {
            let (lo, hi) = t
                .data()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            (lo < hi).then_some((lo, hi))
        });
        if let Some(t) = &self.truth {
            io::save_image(&push("truth.img"), t, Encoding::F64le)?;
            io::render_image(t, &push("truth.pgm"), window)?;
        }
        if let Some(p) = &self.exact {
            io::save_sinogram(&push("sinogram.mrt"), p, Encoding::F64le)?;
        }
        if let Some(f) = &self.folded {
            io::save_modulo_sinogram(&push("folded.mrt"), f, Encoding::F64le)?;
        }
        if let Some(n) = &self.noisy {
            io::save_modulo_sinogram(&push("noisy.mrt"), n, Encoding::F64le)?;
        }
        io::save_sinogram(&push("unfolded.mrt"), &self.unfolded, Encoding::F64le)?;
        io::save_image(&push("reconstruction.img"), &self.reconstruction, Encoding::F64le)?;
        io::render_image(&self.reconstruction, &push("reconstruction.pgm"), window)?;
        io::write_atomic(&push("metrics.txt"), self.metrics.to_key_value().as_bytes())?;
        io::write_atomic(&push("metrics.json"), self.metrics.to_json().as_bytes())?;
        Ok(written)
    }
}
