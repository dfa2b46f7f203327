//! `mrt`: stage-by-stage driver for the modulo Radon toolkit.

use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use modulo_radon::experiment::resolve_phantom;
use modulo_radon::io::{self, Document, Encoding};
use modulo_radon::metrics::{max_abs_err, relative_l2_error, snr_db, ssim};
use modulo_radon::modulo::{add_uniform_noise, fold_sinogram};
use modulo_radon::radon::fbp_reconstruct;
use modulo_radon::{run_experiment, ExperimentConfig, FilterSpec, Image, Method, ModuloSinogram, Unfolding, Window};

#[derive(Parser)]
#[command(name = "mrt", version, about = "Modulo Radon transform: fold, unfold, reconstruct")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a phantom.
    Phantom {
        #[command(flatten)]
        source: PhantomArg,
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Analytic sinogram of a phantom.
    Project {
        #[command(flatten)]
        source: PhantomArg,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fold a sinogram and add bounded uniform noise.
    Fold {
        #[command(flatten)]
        input: SinogramArg,
        #[arg(long)]
        lambda: f64,
        /// Noise bound; 0.05·lambda when omitted.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        downsample: DownsampleArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Recover unfolded data from a folded sinogram.
    Unfold {
        method: Unfolding,
        #[command(flatten)]
        input: SinogramArg,
        #[command(flatten)]
        downsample: DownsampleArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Filtered back projection, unfolding folded input first unless the
    /// method is `fbp`.
    Reconstruct {
        #[command(flatten)]
        input: SinogramArg,
        #[arg(long)]
        method: Option<Method>,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Compare two images or two sinograms.
    Metrics {
        reference: PathBuf,
        estimate: PathBuf,
        /// Also write metrics.txt and metrics.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a container file as an 8-bit graymap.
    Render {
        input: PathBuf,
        #[arg(long, requires = "hi")]
        lo: Option<f64>,
        #[arg(long, requires = "lo")]
        hi: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Full pipeline from a config file and flag overrides.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct PhantomArg {
    /// Built-in phantom (smooth, shepp-logan, zero) or phantom file.
    #[arg(long, default_value = "smooth")]
    phantom: String,
}

#[derive(Args)]
struct SinogramArg {
    /// Sinogram container or headerless CSV.
    #[arg(long)]
    sinogram: PathBuf,
    /// Radial spacing for headerless CSV input; 1/K when omitted.
    #[arg(long = "T")]
    spacing: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long = "M", default_value_t = 360)]
    angles: usize,
    #[arg(long = "K", default_value_t = 1958)]
    half_count: usize,
    /// Radial spacing; 1/K when omitted.
    #[arg(long = "T")]
    spacing: Option<f64>,
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long, default_value = "cosine")]
    filter: Window,
    /// Filter bandwidth L; M when omitted.
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Args)]
struct SizeArg {
    /// Output raster as WxH.
    #[arg(long, default_value = "512x512", value_parser = parse_size)]
    size: (usize, usize),
}

#[derive(Args)]
struct DownsampleArg {
    /// Keep every k-th radial sample (1, 2 or 4).
    #[arg(long, default_value_t = 1)]
    downsample: usize,
}

#[derive(Args)]
struct OutArg {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Payload encoding for sinogram and image files.
    #[arg(long, default_value = "f64le", value_parser = parse_encoding)]
    encoding: Encoding,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML config; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "sinogram")]
    phantom: Option<String>,
    #[arg(long)]
    sinogram: Option<PathBuf>,
    #[arg(long = "M")]
    angles: Option<usize>,
    #[arg(long = "K")]
    half_count: Option<usize>,
    #[arg(long = "T")]
    spacing: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    filter: Option<Window>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long, value_parser = parse_size)]
    size: Option<(usize, usize)>,
    #[arg(long)]
    downsample: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in `{s}`"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in `{s}`"))?;
    if w == 0 || h == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok((w, h))
}

fn parse_encoding(s: &str) -> Result<Encoding, String> {
    match s {
        "csv" => Ok(Encoding::Csv),
        "f64le" => Ok(Encoding::F64le),
        _ => Err(format!("unknown encoding `{s}` (csv, f64le)")),
    }
}

fn load_any_sinogram(arg: &SinogramArg) -> Result<Document> {
    let path = &arg.sinogram;
    let mut head = [0u8; 4];
    let n = std::fs::File::open(path)
        .and_then(|mut f| f.read(&mut head))
        .with_context(|| format!("reading {}", path.display()))?;
    if head[..n] == *b"MRT-" {
        Ok(io::load_sinogram(path)?)
    } else {
        Ok(Document::Sinogram(io::load_raw_csv(path, arg.spacing)?))
    }
}

fn require_modulo(doc: Document, path: &Path) -> Result<ModuloSinogram> {
    match doc {
        Document::Modulo(mp) => Ok(mp),
        other => bail!("{} holds a {}, expected folded data with a lambda entry", path.display(), other.kind()),
    }
}

fn out_file(out: &OutArg, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&out.out).with_context(|| format!("creating {}", out.out.display()))?;
    Ok(out.out.join(name))
}

fn report(path: &Path) {
    println!("wrote {}", path.display());
}

fn save_image_pair(out: &OutArg, stem: &str, img: &Image) -> Result<()> {
    let data = out_file(out, &format!("{stem}.img"))?;
    io::save_image(&data, img, out.encoding)?;
    report(&data);
    let pgm = out_file(out, &format!("{stem}.pgm"))?;
    io::render_image(img, &pgm, None)?;
    report(&pgm);
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Phantom { source, size, out } => {
            let phantom = resolve_phantom(&source.phantom)?;
            save_image_pair(&out, "phantom", &phantom.rasterize(size.size.0, size.size.1))?;
        }
        Command::Project { source, grid, out } => {
            let phantom = resolve_phantom(&source.phantom)?;
            let g = modulo_radon::SamplingGrid::new(
                grid.angles,
                grid.half_count,
                grid.spacing.unwrap_or(1.0 / grid.half_count.max(1) as f64),
            )?;
            let path = out_file(&out, "sinogram.mrt")?;
            io::save_sinogram(&path, &phantom.sinogram(&g), out.encoding)?;
            report(&path);
        }
        Command::Fold {
            input,
            lambda,
            delta,
            seed,
            downsample,
            out,
        } => {
            let p = match load_any_sinogram(&input)? {
                Document::Sinogram(p) => p,
                other => bail!("{} already holds a {}", input.sinogram.display(), other.kind()),
            };
            let folded = fold_sinogram(&p, lambda)?;
            let noisy = add_uniform_noise(&folded, delta.unwrap_or(0.05 * lambda), seed)?;
            let noisy = io::downsample_modulo(&noisy, downsample.downsample)?;
            let path = out_file(&out, "folded.mrt")?;
            io::save_modulo_sinogram(&path, &noisy, out.encoding)?;
            report(&path);
        }
        Command::Unfold {
            method,
            input,
            downsample,
            out,
        } => {
            let mp = require_modulo(load_any_sinogram(&input)?, &input.sinogram)?;
            let mp = io::downsample_modulo(&mp, downsample.downsample)?;
            let unfolded = method.apply(&mp)?;
            let path = out_file(&out, "unfolded.mrt")?;
            io::save_sinogram(&path, &unfolded, out.encoding)?;
            report(&path);
        }
        Command::Reconstruct {
            input,
            method,
            filter,
            size,
            out,
        } => {
            let doc = load_any_sinogram(&input)?;
            let data = match (doc, method.and_then(Method::unfolding)) {
                (Document::Modulo(mp), Some(u)) => u.apply(&mp)?,
                (Document::Modulo(mp), None) => mp.into_sinogram(),
                (Document::Sinogram(p), None) => p,
                (Document::Sinogram(_), Some(_)) => {
                    bail!("--method {} needs folded input", method.expect("matched Some"))
                }
                (Document::Image(_), _) => unreachable!("load_sinogram rejects images"),
            };
            let spec = FilterSpec::new(filter.filter, filter.bandwidth.unwrap_or(data.grid().angles() as f64))?;
            let img = fbp_reconstruct(&data, &spec, size.size.0, size.size.1)?;
            save_image_pair(&out, "reconstruction", &img)?;
        }
        Command::Metrics {
            reference,
            estimate,
            out,
        } => {
            let a = io::load_document(&reference)?;
            let b = io::load_document(&estimate)?;
            let mut lines = Vec::new();
            if let (Document::Image(r), Document::Image(e)) = (&a, &b) {
                lines.push(format!("ssim={}", ssim(e, r)?));
            } else if matches!(a, Document::Image(_)) || matches!(b, Document::Image(_)) {
                bail!("cannot compare a {} with a {}", a.kind(), b.kind());
            }
            match snr_db(a.data(), b.data()) {
                Ok(v) => lines.push(format!("snr_db={v}")),
                Err(modulo_radon::Error::UndefinedMetric(_)) => {}
                Err(e) => return Err(e.into()),
            }
            lines.push(format!("max_abs_err={}", max_abs_err(a.data(), b.data())?));
            if let Ok(v) = relative_l2_error(b.data(), a.data()) {
                lines.push(format!("relative_l2_error={v}"));
            }
            let text = lines.join("\n") + "\n";
            print!("{text}");
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                io::write_atomic(&dir.join("metrics.txt"), text.as_bytes())?;
                let json: serde_json::Map<String, serde_json::Value> = lines
                    .iter()
                    .filter_map(|l| l.split_once('='))
                    .map(|(k, v)| {
                        let value = v
                            .parse::<f64>()
                            .ok()
                            .and_then(serde_json::Number::from_f64)
                            .map_or_else(|| serde_json::Value::String(v.to_string()), serde_json::Value::Number);
                        (k.to_string(), value)
                    })
                    .collect();
                let text = serde_json::to_string_pretty(&json)? + "\n";
                io::write_atomic(&dir.join("metrics.json"), text.as_bytes())?;
            }
        }
        Command::Render { input, lo, hi, out } => {
            let img = match io::load_document(&input)? {
                Document::Image(img) => img,
                other => Image::new(other.data().clone())?,
            };
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("render");
            let path = out_file(&out, &format!("{stem}.pgm"))?;
            io::render_image(&img, &path, lo.zip(hi))?;
            report(&path);
        }
        Command::Experiment(args) => {
            let mut cfg = match &args.config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(p) = args.phantom {
                cfg.phantom = Some(p);
                cfg.sinogram = None;
            }
            if let Some(s) = args.sinogram {
                cfg.sinogram = Some(s);
                cfg.phantom = None;
            }
            macro_rules! set {
                ($($field:ident <- $flag:expr),*) => { $(if let Some(v) = $flag { cfg.$field = v; })* };
            }
            set!(angles <- args.angles, half_count <- args.half_count, lambda <- args.lambda,
                 seed <- args.seed, filter <- args.filter, method <- args.method, downsample <- args.downsample);
            if args.spacing.is_some() {
                cfg.spacing = args.spacing;
            }
            if args.delta.is_some() {
                cfg.delta = args.delta;
            }
            if args.bandwidth.is_some() {
                cfg.bandwidth = args.bandwidth;
            }
            if let Some((w, h)) = args.size {
                cfg.width = w;
                cfg.height = h;
            }
            let output = run_experiment(&cfg)?;
            for path in output.write(&args.out)? {
                report(&path);
            }
            print!("{}", output.metrics.to_key_value());
        }
    }
    Ok(())
}
