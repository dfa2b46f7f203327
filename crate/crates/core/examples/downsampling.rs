//! Halve the radial sampling rate and compare LMU+ against US unfolding.
//!
//! cargo run --release --example downsampling -- [FACTOR] [M] [K]

use std::error::Error;

use modulo_radon::experiment::Unfolding;
use modulo_radon::io::downsample_modulo;
use modulo_radon::metrics::ssim;
use modulo_radon::modulo::{add_uniform_noise, fold_sinogram};
use modulo_radon::radon::fbp_reconstruct;
use modulo_radon::usfbp::satisfies_sampling_condition;
use modulo_radon::{FilterSpec, Phantom, SamplingGrid};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let factor = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let m = args.next().map(|s| s.parse()).transpose()?.unwrap_or(360);
    let k = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1958);

    let phantom = Phantom::shepp_logan();
    let truth = phantom.rasterize(512, 512);
    let grid = SamplingGrid::unit(m, k)?;
    let lambda = 0.06;
    let noisy = add_uniform_noise(&fold_sinogram(&phantom.sinogram(&grid), lambda)?, 0.05 * lambda, 0)?;
    let coarse = downsample_modulo(&noisy, factor)?;
    let filter = FilterSpec::cosine_for(&grid);
    println!(
        "grid {}x{} T = {:.3e}, sampling condition {}",
        coarse.grid().angles(),
        coarse.grid().radial_count(),
        coarse.grid().spacing(),
        satisfies_sampling_condition(coarse.grid(), filter.bandwidth)
    );
    for method in [Unfolding::LmuPlus, Unfolding::Us] {
        let recon = fbp_reconstruct(&method.apply(&coarse)?, &filter, 512, 512)?;
        println!("{:<8} ssim {:.4}", method.name(), ssim(&recon, &truth)?);
    }
    Ok(())
}
