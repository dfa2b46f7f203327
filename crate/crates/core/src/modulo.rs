//! The 2λ-modulo operator, folded sinograms and the integer residual of the
//! decomposition `p = p^λ + 2λ·ε`.

use ndarray::{Array2, Axis, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{check_shape, ModuloSinogram, Sinogram};

/// `M^λ(x) = x - 2λ·⌊(x + λ)/(2λ)⌋`, with values in `[-λ, λ)`.
///
/// `fold(λ, λ) = -λ`: the range is half open.
#[inline]
pub fn fold(x: f64, lambda: f64) -> f64 {
    let period = 2.0 * lambda;
    let r = x - period * ((x + lambda) / period).floor();
    // rounding in the subtraction can land on the excluded endpoint
    if r >= lambda {
        r - period
    } else if r < -lambda {
        r + period
    } else {
        r
    }
}

/// Entrywise fold; the result carries `δ = 0`.
pub fn fold_sinogram(p: &Sinogram, lambda: f64) -> Result<ModuloSinogram> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("threshold must be positive, got {lambda}")));
    }
    let folded = p.map(|v| fold(v, lambda))?;
    ModuloSinogram::new(folded, lambda, 0.0)
}

/// Adds i.i.d. uniform noise on `[-δ, δ]` to folded data without re-folding.
///
/// Row `m` draws from the ChaCha8 stream `m` of `seed`, so the result does not
/// depend on how rows are scheduled.
pub fn add_uniform_noise(mp: &ModuloSinogram, delta: f64, seed: u64) -> Result<ModuloSinogram> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid("delta", format!("noise level must be nonnegative, got {delta}")));
    }
    let mut data = mp.data().clone();
    if delta > 0.0 {
        Zip::indexed(data.axis_iter_mut(Axis(0))).par_for_each(|m, mut row| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(m as u64);
            for v in row.iter_mut() {
                *v += rng.random_range(-delta..=delta);
            }
        });
    }
    let sinogram = Sinogram::new(*mp.grid(), data)?;
    ModuloSinogram::new(sinogram, mp.lambda(), mp.delta() + delta)
}

/// `‖p‖∞ / λ`, how many times the detector threshold is exceeded.
pub fn compression_factor(p: &Sinogram, lambda: f64) -> f64 {
    p.max_abs() / lambda
}

/// Integer field `ε` with `p = p^λ + 2λ·ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualField {
    values: Array2<i64>,
}

impl ResidualField {
    pub fn values(&self) -> &Array2<i64> {
        &self.values
    }

    /// Rebuilds `p^λ + 2λ·ε`.
    pub fn unfold(&self, folded: &Array2<f64>, lambda: f64) -> Array2<f64> {
        let mut out = folded.clone();
        Zip::from(&mut out)
            .and(&self.values)
            .for_each(|o, &e| *o += 2.0 * lambda * e as f64);
        out
    }
}

/// Recovers `ε = (p - p^λ)/(2λ)` from noiseless data.
pub fn residual(p: &Sinogram, folded: &Sinogram, lambda: f64) -> Result<ResidualField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("threshold must be positive, got {lambda}")));
    }
    check_shape(p.data().dim(), folded.data().dim())?;
    let mut values = Array2::zeros(p.data().dim());
    for (((m, n), &orig), &f) in p.data().indexed_iter().zip(folded.data().iter()) {
        let q = (orig - f) / (2.0 * lambda);
        let k = q.round();
        if (q - k).abs() > 1e-9 * q.abs().max(1.0) {
            return Err(Error::Inconsistent(format!(
                "entry [{m}, {n}]: (p - p_folded)/(2 lambda) = {q} is not an integer"
            )));
        }
        values[[m, n]] = k as i64;
    }
    Ok(ResidualField { values })
}
