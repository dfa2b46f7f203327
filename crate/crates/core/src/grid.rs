//! Parallel-beam sampling grids and the containers bound to them.
//!
//! Angles cover the half turn `[0, π)`; the other half of the sinogram is
//! implied by the evenness `Rf(ϑ + π, t) = Rf(ϑ, -t)`. Radial samples are
//! `t_n = (n - K)·T` for `n = 0..2K`, so the centre column sits at `t = 0`.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Angular/radial discretization of the sinogram domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingGrid {
    angles: usize,
    half_count: usize,
    spacing: f64,
}

impl SamplingGrid {
    /// Builds a grid with `angles` (M) directions over `[0, π)`, `half_count`
    /// (K) radial samples on each side of the origin and radial spacing `T`.
    pub fn new(angles: usize, half_count: usize, spacing: f64) -> Result<Self> {
        if angles == 0 {
            return Err(Error::invalid("M", "angle count must be positive"));
        }
        if half_count == 0 {
            return Err(Error::invalid("K", "radial half-count must be positive"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid("T", format!("spacing must be positive, got {spacing}")));
        }
        let grid = Self {
            angles,
            half_count,
            spacing,
        };
        if !grid.covers_unit_support() {
            log::warn!(
                "radial grid K*T = {} does not reach |t| = 1; projections may be truncated",
                half_count as f64 * spacing
            );
        }
        Ok(grid)
    }

    /// Grid with `T = 1/K`, the layout used for data on the unit ball.
    pub fn unit(angles: usize, half_count: usize) -> Result<Self> {
        Self::new(angles, half_count, 1.0 / half_count.max(1) as f64)
    }

    /// M
    pub fn angles(&self) -> usize {
        self.angles
    }

    /// K
    pub fn half_count(&self) -> usize {
        self.half_count
    }

    /// N = 2K + 1
    pub fn radial_count(&self) -> usize {
        2 * self.half_count + 1
    }

    /// T
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `(M, N)`, the shape of every sinogram on this grid.
    pub fn shape(&self) -> (usize, usize) {
        (self.angles, self.radial_count())
    }

    pub fn angle(&self, m: usize) -> f64 {
        m as f64 * PI / self.angles as f64
    }

    pub fn radial(&self, n: usize) -> f64 {
        (n as f64 - self.half_count as f64) * self.spacing
    }

    pub fn angle_values(&self) -> Vec<f64> {
        (0..self.angles).map(|m| self.angle(m)).collect()
    }

    pub fn radial_values(&self) -> Vec<f64> {
        (0..self.radial_count()).map(|n| self.radial(n)).collect()
    }

    /// `K·T ≥ 1`: the radial window contains `supp Rf(ϑ, ·) ⊆ (-1, 1)`.
    pub fn covers_unit_support(&self) -> bool {
        self.half_count as f64 * self.spacing >= 1.0 - 1e-12
    }
}

/// Real Radon samples `p[m, n] = Rf(ϑ_m, t_n)`, rows indexed by angle.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    grid: SamplingGrid,
    data: Array2<f64>,
}

impl Sinogram {
    pub fn new(grid: SamplingGrid, data: Array2<f64>) -> Result<Self> {
        check_shape(grid.shape(), data.dim())?;
        check_finite(&data)?;
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: SamplingGrid) -> Self {
        Self {
            grid,
            data: Array2::zeros(grid.shape()),
        }
    }

    /// Samples `f(ϑ_m, t_n)` on every grid node.
    pub fn from_fn(grid: SamplingGrid, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let data = Array2::from_shape_fn(grid.shape(), |(m, n)| f(grid.angle(m), grid.radial(n)));
        Self::new(grid, data)
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Returns a copy with `f` applied entrywise, re-checking finiteness.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.data.mapv(f))
    }
}

/// Folded (and possibly noisy) projections together with the modulo
/// threshold `λ` and the sup-norm noise bound `δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuloSinogram {
    sinogram: Sinogram,
    lambda: f64,
    delta: f64,
}

impl ModuloSinogram {
    pub fn new(sinogram: Sinogram, lambda: f64, delta: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid("lambda", format!("threshold must be positive, got {lambda}")));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::invalid("delta", format!("noise level must be nonnegative, got {delta}")));
        }
        let lo = -lambda - delta;
        let hi = lambda + delta;
        for ((m, n), &v) in sinogram.data().indexed_iter() {
            let inside = if delta == 0.0 {
                v >= -lambda && v < lambda
            } else {
                v >= lo && v <= hi
            };
            if !inside {
                return Err(Error::Inconsistent(format!(
                    "entry [{m}, {n}] = {v} lies outside the modulo range for lambda = {lambda}, delta = {delta}"
                )));
            }
        }
        Ok(Self {
            sinogram,
            lambda,
            delta,
        })
    }

    pub fn sinogram(&self) -> &Sinogram {
        &self.sinogram
    }

    pub fn grid(&self) -> &SamplingGrid {
        self.sinogram.grid()
    }

    pub fn data(&self) -> &Array2<f64> {
        self.sinogram.data()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn into_sinogram(self) -> Sinogram {
        self.sinogram
    }
}

/// Raster on the square `[-1, 1]²`. Storage is `(height, width)`; row `j`
/// holds pixel centres at `y_j = -1 + (2j + 1)/H`, column `i` at
/// `x_i = -1 + (2i + 1)/W`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    data: Array2<f64>,
}

impl Image {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (h, w) = data.dim();
        if h == 0 || w == 0 {
            return Err(Error::invalid("size", "image dimensions must be positive"));
        }
        check_finite(&data)?;
        Ok(Self { data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            data: Array2::zeros((height.max(1), width.max(1))),
        }
    }

    pub fn width(&self) -> usize {
        self.data.ncols()
    }

    pub fn height(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    pub fn x_center(&self, i: usize) -> f64 {
        pixel_center(i, self.width())
    }

    pub fn y_center(&self, j: usize) -> f64 {
        pixel_center(j, self.height())
    }

    /// Value at `(x, y)` by bilinear interpolation between pixel centres;
    /// zero outside the raster.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let (h, w) = self.data.dim();
        // continuous pixel coordinates: centre of pixel i sits at i
        let u = (x + 1.0) * w as f64 / 2.0 - 0.5;
        let v = (y + 1.0) * h as f64 / 2.0 - 0.5;
        if !(u > -1.0 && v > -1.0 && u < w as f64 && v < h as f64) {
            return 0.0;
        }
        let i0 = u.floor();
        let j0 = v.floor();
        let fu = u - i0;
        let fv = v - j0;
        let (i0, j0) = (i0 as isize, j0 as isize);
        let at = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i >= w as isize || j >= h as isize {
                0.0
            } else {
                self.data[[j as usize, i as usize]]
            }
        };
        (1.0 - fv) * ((1.0 - fu) * at(i0, j0) + fu * at(i0 + 1, j0))
            + fv * ((1.0 - fu) * at(i0, j0 + 1) + fu * at(i0 + 1, j0 + 1))
    }
}

/// Centre of pixel `i` out of `count` along one axis of `[-1, 1]`.
pub fn pixel_center(i: usize, count: usize) -> f64 {
    -1.0 + (2 * i + 1) as f64 / count as f64
}

pub(crate) fn check_shape(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn check_finite(data: &Array2<f64>) -> Result<()> {
    match data.indexed_iter().find(|(_, v)| !v.is_finite()) {
        Some(((row, col), _)) => Err(Error::NonFinite { row, col }),
        None => Ok(()),
    }
}
