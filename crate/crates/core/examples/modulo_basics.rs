//! Folding, the integer residual and one-dimensional unfolding on a single line.

use std::error::Error;

use modulo_radon::modulo::fold;
use modulo_radon::usfbp::us_unfold_line;

fn main() -> Result<(), Box<dyn Error>> {
    let lambda = 0.25;
    let line: Vec<f64> = (0..41).map(|n| (n as f64 * 0.1).sin() * 1.3).collect();
    let folded: Vec<f64> = line.iter().map(|&x| fold(x, lambda)).collect();
    let recovered = us_unfold_line(&folded, lambda);
    println!("{:>8} {:>10} {:>4} {:>10}", "value", "folded", "r", "unfolded");
    for ((x, y), u) in line.iter().zip(&folded).zip(&recovered).step_by(4) {
        let r = ((x - y) / (2.0 * lambda)).round();
        println!("{x:>8.4} {y:>10.4} {r:>4} {u:>10.4}");
    }
    let err = line.iter().zip(&recovered).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max error {err:.2e}");
    Ok(())
}
