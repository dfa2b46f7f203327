//! Image and data fidelity measures. Reductions run serially in a fixed order
//! so values do not depend on the thread count.

use ndarray::{Array2, Axis, Zip};

use crate::error::{Error, Result};
use crate::grid::{check_shape, Image};

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Mean SSIM of `a` against the reference `b`, Gaussian window 11×11 with
/// σ = 1.5, `K1 = 0.01`, `K2 = 0.03` and dynamic range `max(b) - min(b)`.
///
/// Local statistics are taken over windows fully inside the image; images
/// smaller than the window use the largest odd window that fits. A constant
/// reference falls back to a dynamic range of 1.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    let (lo, hi) = b.data().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    ssim_with_range(a, b, if range > 0.0 { range } else { 1.0 })
}

/// [`ssim`] with an explicit dynamic range.
pub fn ssim_with_range(a: &Image, b: &Image, range: f64) -> Result<f64> {
    check_shape(b.data().dim(), a.data().dim())?;
    if !(range.is_finite() && range > 0.0) {
        return Err(Error::invalid("range", format!("dynamic range must be positive, got {range}")));
    }
    let (h, w) = a.data().dim();
    let size = WINDOW.min(odd_floor(h)).min(odd_floor(w));
    let taps = gaussian_taps(size);
    let x = a.data();
    let y = b.data();
    let mu_x = filter_valid(x, &taps);
    let mu_y = filter_valid(y, &taps);
    let xx = filter_valid(&(x * x), &taps);
    let yy = filter_valid(&(y * y), &taps);
    let xy = filter_valid(&(x * y), &taps);

    let c1 = (K1 * range).powi(2);
    let c2 = (K2 * range).powi(2);
    let mut map = Array2::zeros(mu_x.dim());
    Zip::from(&mut map)
        .and(&mu_x)
        .and(&mu_y)
        .and(&xx)
        .and(&yy)
        .and(&xy)
        .for_each(|s, &mx, &my, &sxx, &syy, &sxy| {
            let vx = sxx - mx * mx;
            let vy = syy - my * my;
            let cov = sxy - mx * my;
            *s = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        });
    Ok(map.iter().sum::<f64>() / map.len() as f64)
}

fn odd_floor(n: usize) -> usize {
    if n % 2 == 1 {
        n
    } else {
        n - 1
    }
}

fn gaussian_taps(size: usize) -> Vec<f64> {
    let c = (size / 2) as f64;
    let raw: Vec<f64> = (0..size)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * SIGMA * SIGMA)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Separable correlation keeping only fully covered positions.
fn filter_valid(data: &Array2<f64>, taps: &[f64]) -> Array2<f64> {
    let (h, w) = data.dim();
    let k = taps.len();
    let mut rows = Array2::<f64>::zeros((h, w + 1 - k));
    Zip::from(rows.axis_iter_mut(Axis(0)))
        .and(data.axis_iter(Axis(0)))
        .par_for_each(|mut out, line| {
            for (j, o) in out.iter_mut().enumerate() {
                *o = taps.iter().enumerate().map(|(t, c)| c * line[j + t]).sum();
            }
        });
    let mut out = Array2::<f64>::zeros((h + 1 - k, w + 1 - k));
    Zip::from(out.axis_iter_mut(Axis(1)))
        .and(rows.axis_iter(Axis(1)))
        .par_for_each(|mut out, col| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = taps.iter().enumerate().map(|(t, c)| c * col[i + t]).sum();
            }
        });
    out
}

/// `20·log10(‖ref‖₂ / ‖ref - perturbed‖₂)`; `+∞` when the two agree.
pub fn snr_db(reference: &Array2<f64>, perturbed: &Array2<f64>) -> Result<f64> {
    check_shape(reference.dim(), perturbed.dim())?;
    let signal = l2(reference.iter().copied());
    if signal == 0.0 {
        return Err(Error::UndefinedMetric("SNR of an all-zero reference"));
    }
    let noise = l2(reference.iter().zip(perturbed.iter()).map(|(a, b)| a - b));
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (signal / noise).log10())
}

/// `‖a - b‖∞`
pub fn max_abs_err(a: &Array2<f64>, b: &Array2<f64>) -> Result<f64> {
    check_shape(a.dim(), b.dim())?;
    Ok(a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// `‖estimate - reference‖₂ / ‖reference‖₂`
pub fn relative_l2_error(estimate: &Array2<f64>, reference: &Array2<f64>) -> Result<f64> {
    check_shape(reference.dim(), estimate.dim())?;
    let norm = l2(reference.iter().copied());
    if norm == 0.0 {
        return Err(Error::UndefinedMetric("relative error against an all-zero reference"));
    }
    Ok(l2(estimate.iter().zip(reference.iter()).map(|(a, b)| a - b)) / norm)
}

fn l2(values: impl Iterator<Item = f64>) -> f64 {
    // scaled accumulation avoids overflow for large entries
    let mut scale = 0.0_f64;
    let mut sum = 1.0_f64;
    for v in values {
        let a = v.abs();
        if a == 0.0 {
            continue;
        }
        if a > scale {
            sum = 1.0 + sum * (scale / a).powi(2);
            scale = a;
        } else {
            sum += (a / scale).powi(2);
        }
    }
    scale * sum.sqrt()
}
