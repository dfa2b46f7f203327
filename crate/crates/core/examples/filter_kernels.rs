//! Print the three band-limited FBP kernels on a few abscissae.
//!
//! cargo run --example filter_kernels -- [BANDWIDTH]

use std::error::Error;

use modulo_radon::radon::{fbp_kernel, Window};
use modulo_radon::FilterSpec;

fn main() -> Result<(), Box<dyn Error>> {
    let bandwidth: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(360.0);
    let windows = [Window::RamLak, Window::SheppLogan, Window::Cosine];
    print!("{:>12}", "t * L");
    for w in windows {
        print!("{:>16}", w.name());
    }
    println!();
    for step in 0..=12 {
        let t = step as f64 * 0.5 / bandwidth;
        print!("{:>12.2}", t * bandwidth);
        for w in windows {
            let filter = FilterSpec::new(w, bandwidth)?;
            print!("{:>16.6e}", fbp_kernel(&filter, t));
        }
        println!();
    }
    Ok(())
}
