//! First-order unlimited-sampling unfolding along radial lines, followed by
//! the shared FBP stage. Used as the baseline comparator.

use std::f64::consts::E;

use ndarray::{Axis, Zip};

use crate::error::{Error, Result};
use crate::grid::{Image, ModuloSinogram, SamplingGrid, Sinogram};
use crate::modulo::fold;
use crate::radon::{fbp_reconstruct, FilterSpec};

/// Unfolds one line from its folded first differences.
///
/// `e[n] = round((M^λ(Δy[n]) - Δy[n]) / 2λ)`, `r[0] = 0`, `r[n+1] = r[n] + e[n]`
/// and the output is `y + 2λ·r`. The anchor `r[0] = 0` assumes the first
/// sample was not folded, which holds when it lies outside the object support.
pub fn us_unfold_line(y: &[f64], lambda: f64) -> Vec<f64> {
    let period = 2.0 * lambda;
    let mut out = Vec::with_capacity(y.len());
    let mut r = 0.0;
    for (n, &v) in y.iter().enumerate() {
        if n > 0 {
            let d = v - y[n - 1];
            r += ((fold(d, lambda) - d) / period).round();
        }
        out.push(v + period * r);
    }
    out
}

/// Row-wise [`us_unfold_line`]. Only `order = 1` is supported; higher orders
/// are known to break down on tomographic data.
pub fn us_unfold(mp: &ModuloSinogram, order: usize) -> Result<Sinogram> {
    if order != 1 {
        return Err(Error::invalid("order", format!("only first-order differences are supported, got {order}")));
    }
    let lambda = mp.lambda();
    let mut data = mp.data().clone();
    Zip::from(data.axis_iter_mut(Axis(0))).par_for_each(|mut row| {
        let line: Vec<f64> = row.iter().copied().collect();
        for (o, v) in row.iter_mut().zip(us_unfold_line(&line, lambda)) {
            *o = v;
        }
    });
    Sinogram::new(*mp.grid(), data)
}

/// Sampling condition `T ≤ 1/(2Le)` under which first-order recovery of
/// `L`-bandlimited data is guaranteed.
pub fn satisfies_sampling_condition(grid: &SamplingGrid, bandwidth: f64) -> bool {
    grid.spacing() <= 1.0 / (2.0 * bandwidth * E)
}

/// US unfolding followed by filtered back projection.
pub fn us_fbp(mp: &ModuloSinogram, filter: &FilterSpec, width: usize, height: usize) -> Result<Image> {
    if !satisfies_sampling_condition(mp.grid(), filter.bandwidth) {
        log::warn!(
            "T = {} exceeds 1/(2Le) = {} for L = {}; first-order unfolding is not guaranteed",
            mp.grid().spacing(),
            1.0 / (2.0 * filter.bandwidth * E),
            filter.bandwidth
        );
    }
    let unfolded = us_unfold(mp, 1).map_err(|e| e.at_stage("unfold"))?;
    fbp_reconstruct(&unfolded, filter, width, height).map_err(|e| e.at_stage("reconstruct"))
}
