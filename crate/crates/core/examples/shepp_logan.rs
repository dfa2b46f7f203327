//! Shepp-Logan at lambda = 0.06: LMU, LMU+ and US unfolding side by side.
//!
//! cargo run --release --example shepp_logan -- [OUT_DIR] [M] [K]

use std::error::Error;
use std::path::PathBuf;

use modulo_radon::experiment::Unfolding;
use modulo_radon::io::render_image;
use modulo_radon::metrics::{max_abs_err, ssim};
use modulo_radon::modulo::{add_uniform_noise, fold_sinogram};
use modulo_radon::radon::fbp_reconstruct;
use modulo_radon::{FilterSpec, Phantom, SamplingGrid};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "example-out".into()));
    let m = args.next().map(|s| s.parse()).transpose()?.unwrap_or(360);
    let k = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1958);
    std::fs::create_dir_all(&out)?;

    let phantom = Phantom::shepp_logan();
    let grid = SamplingGrid::unit(m, k)?;
    let filter = FilterSpec::cosine_for(&grid);
    let truth = phantom.rasterize(512, 512);
    let p = phantom.sinogram(&grid);
    let lambda = 0.06;
    let noisy = add_uniform_noise(&fold_sinogram(&p, lambda)?, 0.05 * lambda, 0)?;

    let reference = fbp_reconstruct(&p, &filter, 512, 512)?;
    println!("{:<8} ssim {:.4}", "fbp", ssim(&reference, &truth)?);
    for method in [Unfolding::Lmu, Unfolding::LmuPlus, Unfolding::Us] {
        let unfolded = method.apply(&noisy)?;
        let recon = fbp_reconstruct(&unfolded, &filter, 512, 512)?;
        println!(
            "{:<8} ssim {:.4}  unfold err {:.3e}",
            method.name(),
            ssim(&recon, &truth)?,
            max_abs_err(unfolded.data(), p.data())?
        );
        let file = format!("shepp_{}.pgm", method.name().replace('+', "plus"));
        render_image(&recon, &out.join(file), Some((0.0, 1.0)))?;
    }
    Ok(())
}
