//! Independent numerical oracles for integration tests.

#![allow(dead_code)]

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // start from many panels so oscillatory integrands are resolved
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            step(f, lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb), tol / pieces as f64, 50)
        })
        .sum()
}

/// `(1/2π) ∫_{-L}^{L} |S| W(S/L) e^{iSt} dS` by quadrature of the even integrand.
pub fn kernel_by_quadrature(window: &dyn Fn(f64) -> f64, bandwidth: f64, t: f64) -> f64 {
    let l = bandwidth;
    adaptive_simpson(&|s| s * window(s / l) * (s * t).cos(), 0.0, l, 1e-14 * l * l) / std::f64::consts::PI
}

/// Line integral of a pointwise function along `x·θ = t` by quadrature in `s`.
pub fn line_integral(f: &dyn Fn([f64; 2]) -> f64, angle: f64, t: f64, tol: f64) -> f64 {
    let (sn, cs) = angle.sin_cos();
    let half = (1.0 - t * t).max(0.0).sqrt();
    adaptive_simpson(&|s| f([t * cs - s * sn, t * sn + s * cs]), -half, half, tol)
}
