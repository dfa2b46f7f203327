//! Fold the smooth phantom about 50-fold, unfold with LMU and reconstruct.
//!
//! cargo run --release --example smooth_phantom -- [OUT_DIR] [M] [K]

use std::error::Error;
use std::path::PathBuf;

use modulo_radon::io::render_image;
use modulo_radon::lmu::lmu_unfold;
use modulo_radon::metrics::{max_abs_err, snr_db, ssim};
use modulo_radon::modulo::{add_uniform_noise, compression_factor, fold_sinogram};
use modulo_radon::radon::fbp_reconstruct;
use modulo_radon::{FilterSpec, Image, Phantom, SamplingGrid};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "example-out".into()));
    let m = args.next().map(|s| s.parse()).transpose()?.unwrap_or(360);
    let k = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1958);
    std::fs::create_dir_all(&out)?;

    let phantom = Phantom::smooth();
    let grid = SamplingGrid::unit(m, k)?;
    let p = phantom.sinogram(&grid);
    let lambda = 0.015;
    let folded = fold_sinogram(&p, lambda)?;
    let noisy = add_uniform_noise(&folded, 0.05 * lambda, 0)?;
    println!("compression factor {:.1}", compression_factor(&p, lambda));
    println!("data snr {:.2} dB", snr_db(folded.data(), noisy.data())?);

    let unfolded = lmu_unfold(&noisy)?;
    println!("max unfolding error {:.3e}", max_abs_err(unfolded.data(), p.data())?);

    let recon = fbp_reconstruct(&unfolded, &FilterSpec::cosine_for(&grid), 512, 512)?;
    let truth = phantom.rasterize(512, 512);
    println!("ssim {:.4}", ssim(&recon, &truth)?);

    render_image(&Image::new(noisy.data().clone())?, &out.join("smooth_folded.pgm"), None)?;
    render_image(&recon, &out.join("smooth_lmu_fbp.pgm"), None)?;
    println!("images in {}", out.display());
    Ok(())
}
