//! Save, reload, normalize and render sinograms in every supported format.
//!
//! cargo run --example sinogram_io -- [OUT_DIR]

use std::error::Error;
use std::path::PathBuf;

use modulo_radon::io::{
    load_document, load_raw_csv, normalize_sinogram, render_image, save_modulo_sinogram, save_sinogram, Encoding,
};
use modulo_radon::modulo::fold_sinogram;
use modulo_radon::{Image, Phantom, SamplingGrid};

fn main() -> Result<(), Box<dyn Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "example-out".into()));
    std::fs::create_dir_all(&out)?;

    let grid = SamplingGrid::unit(90, 128)?;
    let p = Phantom::shepp_logan().sinogram(&grid);
    save_sinogram(&out.join("shepp.mrt"), &p, Encoding::Csv)?;
    save_modulo_sinogram(&out.join("shepp_folded.mrt"), &fold_sinogram(&p, 0.06)?, Encoding::F64le)?;
    for name in ["shepp.mrt", "shepp_folded.mrt"] {
        let doc = load_document(&out.join(name))?;
        println!("{name}: {} {:?}", doc.kind(), doc.data().dim());
    }

    let raw: String = p
        .data()
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(out.join("raw.csv"), raw)?;
    let loaded = load_raw_csv(&out.join("raw.csv"), Some(grid.spacing()))?;
    let unit = normalize_sinogram(&loaded)?;
    println!("raw csv max {:.4}, normalized max {:.4}", loaded.max_abs(), unit.max_abs());

    render_image(&Image::new(unit.into_data())?, &out.join("shepp_sinogram.pgm"), None)?;
    Ok(())
}
