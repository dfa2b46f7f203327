//! Laplacian modulo unfolding.
//!
//! Folded projections are extended to the doubled torus `[0, 2π) × [-(K+1)T,
//! (3K+3)T)` (evenness in the angle, odd reflection about the radial
//! boundary), the Laplacian of the unfolded data is assembled from
//! `sin(πp/λ)` and `cos(πp/λ)`, which are blind to the folding, and a spectral
//! Poisson solve returns the unfolded sinogram.
//!
//! Frequencies are physical: the angular axis has period `2π` and the radial
//! axis period `(2N + 2)·T`, so the multiplier is
//! `-(k_ϑ² + (2π k_t / ((2N + 2) T))²)`.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{s, Array2, Axis, Zip};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft2::{signed_frequency, Fft2};
use crate::grid::{check_shape, ModuloSinogram, SamplingGrid, Sinogram};

/// Sinogram data extended to the `2M × (2N + 2)` torus.
///
/// Rows `M..2M` hold `base[m - M, N - 1 - n]`; columns `0` and `N + 1` are
/// zero and columns `N + 2..2N + 2` are the negated mirror of `1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedField {
    grid: SamplingGrid,
    data: Array2<f64>,
}

impl ExtendedField {
    /// Extends an `M × N` array laid out on `grid`.
    pub fn from_array(grid: &SamplingGrid, base: &Array2<f64>) -> Result<Self> {
        check_shape(grid.shape(), base.dim())?;
        let (m_count, n_count) = grid.shape();
        let mut data = Array2::zeros(extended_shape(grid));
        for m in 0..2 * m_count {
            for n in 0..n_count {
                let v = if m < m_count {
                    base[[m, n]]
                } else {
                    base[[m - m_count, n_count - 1 - n]]
                };
                data[[m, n + 1]] = v;
                data[[m, 2 * n_count + 1 - n]] = -v;
            }
        }
        Ok(Self { grid: *grid, data })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    /// The original `M × N` window: rows `0..M`, columns `1..=N`.
    pub fn restrict(&self) -> Array2<f64> {
        restrict(&self.grid, &self.data)
    }
}

/// `2M × (2N + 2)`
pub fn extended_shape(grid: &SamplingGrid) -> (usize, usize) {
    (2 * grid.angles(), 2 * grid.radial_count() + 2)
}

fn restrict(grid: &SamplingGrid, full: &Array2<f64>) -> Array2<f64> {
    let (m, n) = grid.shape();
    full.slice(s![..m, 1..=n]).to_owned()
}

/// Evenness and odd-reflection extension of folded data.
pub fn extend(mp: &ModuloSinogram) -> Result<ExtendedField> {
    ExtendedField::from_array(mp.grid(), mp.data())
}

/// Symbol `-(2π|ξ|)²` of the Laplacian on the extended torus, together with
/// the transform plan for its shape.
#[derive(Clone, Debug)]
pub struct SpectralMultiplier {
    values: Array2<f64>,
    angular_period: f64,
    radial_period: f64,
    plan: Arc<Fft2>,
}

impl SpectralMultiplier {
    pub fn for_grid(grid: &SamplingGrid) -> Self {
        let (rows, cols) = extended_shape(grid);
        Self::with_periods(rows, cols, 2.0 * PI, cols as f64 * grid.spacing())
    }

    /// Multiplier on a `rows × cols` torus with the given physical periods.
    pub fn with_periods(rows: usize, cols: usize, angular_period: f64, radial_period: f64) -> Self {
        let values = Array2::from_shape_fn((rows, cols), |(i, j)| {
            let wa = 2.0 * PI * signed_frequency(i, rows) / angular_period;
            let wr = 2.0 * PI * signed_frequency(j, cols) / radial_period;
            -(wa * wa + wr * wr)
        });
        Self {
            values,
            angular_period,
            radial_period,
            plan: Arc::new(Fft2::new(rows, cols)),
        }
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn periods(&self) -> (f64, f64) {
        (self.angular_period, self.radial_period)
    }

    /// Largest magnitude of the symbol (the operator norm of the Laplacian).
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn apply(&self, field: &Array2<f64>, symbol: impl Fn(f64) -> f64 + Sync) -> Result<Array2<Complex64>> {
        check_shape(self.shape(), field.dim())?;
        let mut buf = field.mapv(|v| Complex64::new(v, 0.0));
        self.plan.forward(&mut buf);
        Zip::from(&mut buf)
            .and(&self.values)
            .par_for_each(|b, &w| *b *= symbol(w));
        self.plan.inverse(&mut buf);
        Ok(buf)
    }
}

/// `Re IDFT[-(2π|ξ|)² DFT[field]]`.
///
/// Fails when the discarded imaginary part exceeds `1e-9·‖field‖∞` scaled by
/// the spectral radius, which only happens for inputs that break the
/// real-symmetric structure.
pub fn spectral_laplacian(field: &Array2<f64>, multiplier: &SpectralMultiplier) -> Result<Array2<f64>> {
    let out = multiplier.apply(field, |w| w)?;
    let scale = field.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let bound = 1e-9 * scale * multiplier.spectral_radius().max(1.0);
    let residue = out.iter().fold(0.0_f64, |m, v| m.max(v.im.abs()));
    if residue > bound {
        return Err(Error::NumericalSymmetry { residue, bound });
    }
    Ok(out.mapv(|v| v.re))
}

/// Right-hand side `(λ/π)[cos(πp/λ)·Δsin(πp/λ) - sin(πp/λ)·Δcos(πp/λ)]`.
pub fn assemble_rhs(ext: &ExtendedField, lambda: f64) -> Result<Array2<f64>> {
    assemble_rhs_with(ext, lambda, &SpectralMultiplier::for_grid(ext.grid()))
}

pub fn assemble_rhs_with(ext: &ExtendedField, lambda: f64, multiplier: &SpectralMultiplier) -> Result<Array2<f64>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("threshold must be positive, got {lambda}")));
    }
    let phase = ext.data().mapv(|v| PI * v / lambda);
    let sin = phase.mapv(f64::sin);
    let cos = phase.mapv(f64::cos);
    let lap_sin = spectral_laplacian(&sin, multiplier)?;
    let lap_cos = spectral_laplacian(&cos, multiplier)?;
    let mut rhs = Array2::zeros(phase.dim());
    Zip::from(&mut rhs)
        .and(&sin)
        .and(&cos)
        .and(&lap_sin)
        .and(&lap_cos)
        .par_for_each(|r, &s, &c, &ls, &lc| *r = lambda / PI * (c * ls - s * lc));
    Ok(rhs)
}

/// Inverts the multiplier in frequency space; the zero frequency maps to zero,
/// giving the mean-free solution.
pub fn poisson_solve(rhs: &Array2<f64>, multiplier: &SpectralMultiplier) -> Result<Array2<f64>> {
    let out = multiplier.apply(rhs, |w| if w == 0.0 { 0.0 } else { 1.0 / w })?;
    Ok(out.mapv(|v| v.re))
}

/// Largest magnitude on the two Dirichlet columns (0 and N + 1) of a solution
/// on the extended torus.
pub fn dirichlet_residual(grid: &SamplingGrid, full: &Array2<f64>) -> f64 {
    let n = grid.radial_count();
    full.column(0)
        .iter()
        .chain(full.column(n + 1).iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Unfolds modulo projections by the spectral Poisson solve and restricts the
/// solution to the measured window.
pub fn lmu_unfold(mp: &ModuloSinogram) -> Result<Sinogram> {
    let ext = extend(mp)?;
    let multiplier = SpectralMultiplier::for_grid(mp.grid());
    let rhs = assemble_rhs_with(&ext, mp.lambda(), &multiplier)?;
    let solution = poisson_solve(&rhs, &multiplier)?;
    let unfolded = restrict(mp.grid(), &solution);
    let scale = unfolded.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let boundary = dirichlet_residual(mp.grid(), &solution);
    if boundary > 1e-6 * scale {
        log::debug!("Poisson solution deviates from zero on the radial boundary by {boundary:e}");
    }
    Sinogram::new(*mp.grid(), unfolded)
}

/// Rounds the correction onto the `2λ` lattice anchored at the folded data:
/// `p^λ + 2λ·round((p_lmu - p^λ)/(2λ))`, ties away from zero.
pub fn improve(p_lmu: &Sinogram, mp: &ModuloSinogram) -> Result<Sinogram> {
    check_shape(mp.grid().shape(), p_lmu.data().dim())?;
    if p_lmu.grid() != mp.grid() {
        return Err(Error::Inconsistent("unfolded and folded sinograms live on different grids".into()));
    }
    let two_lambda = 2.0 * mp.lambda();
    let mut out = mp.data().clone();
    Zip::from(out.axis_iter_mut(Axis(0)))
        .and(p_lmu.data().axis_iter(Axis(0)))
        .par_for_each(|mut row, lmu_row| {
            for (o, &l) in row.iter_mut().zip(lmu_row.iter()) {
                *o += two_lambda * ((l - *o) / two_lambda).round();
            }
        });
    Sinogram::new(*mp.grid(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulo::fold_sinogram;
    use ndarray::array;

    fn grid(m: usize, k: usize) -> SamplingGrid {
        SamplingGrid::new(m, k, 1.0 / k as f64).unwrap()
    }

    #[test]
    fn extension_layout() {
        let g = grid(1, 1);
        let base = array![[1.0, 2.0, 3.0]];
        let ext = ExtendedField::from_array(&g, &base).unwrap();
        assert_eq!(
            ext.data(),
            &array![
                [0.0, 1.0, 2.0, 3.0, 0.0, -3.0, -2.0, -1.0],
                [0.0, 3.0, 2.0, 1.0, 0.0, -1.0, -2.0, -3.0]
            ]
        );
        assert_eq!(ext.restrict(), base);
    }

    #[test]
    fn extension_of_zero_is_zero() {
        let g = grid(3, 4);
        let ext = ExtendedField::from_array(&g, &Array2::zeros(g.shape())).unwrap();
        assert!(ext.data().iter().all(|&v| v == 0.0));
        assert_eq!(ext.data().dim(), (6, 20));
    }

    #[test]
    fn full_scale_extended_shape() {
        assert_eq!(extended_shape(&grid(360, 1958)), (720, 7836));
    }

    #[test]
    fn extension_invariants_on_random_data() {
        let g = grid(5, 6);
        let (m, n) = g.shape();
        let base = Array2::from_shape_fn((m, n), |(i, j)| ((i * 31 + j * 17) % 13) as f64 - 6.0);
        let ext = ExtendedField::from_array(&g, &base).unwrap();
        let d = ext.data();
        for r in 0..2 * m {
            assert_eq!(d[[r, 0]], 0.0);
            assert_eq!(d[[r, n + 1]], 0.0);
            for c in 1..=n {
                assert_eq!(d[[r, 2 * n + 2 - c]], -d[[r, c]]);
            }
            assert_eq!(d.row(r).sum(), 0.0);
        }
        for r in m..2 * m {
            for c in 0..n {
                assert_eq!(d[[r, c + 1]], base[[r - m, n - 1 - c]]);
            }
        }
        assert_eq!(ext.restrict(), base);
    }

    #[test]
    fn multiplier_properties() {
        let mult = SpectralMultiplier::for_grid(&grid(4, 3));
        let v = mult.values();
        let (r, c) = v.dim();
        assert_eq!(v[[0, 0]], 0.0);
        for i in 0..r {
            for j in 0..c {
                if (i, j) != (0, 0) {
                    assert!(v[[i, j]] < 0.0);
                }
                assert_eq!(v[[i, j]], v[[(r - i) % r, j]]);
                assert_eq!(v[[i, j]], v[[i, (c - j) % c]]);
            }
        }
        // angular axis: period 2π so mode k has eigenvalue -k²
        assert!((v[[1, 0]] + 1.0).abs() < 1e-12);
        assert!((v[[2, 0]] + 4.0).abs() < 1e-12);
    }

    fn cosine_mode(rows: usize, cols: usize, ka: usize, kr: usize) -> Array2<f64> {
        Array2::from_shape_fn((rows, cols), |(i, j)| {
            (2.0 * PI * (ka as f64 * i as f64 / rows as f64 + kr as f64 * j as f64 / cols as f64)).cos()
        })
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let mult = SpectralMultiplier::for_grid(&grid(4, 5));
        let (r, c) = mult.shape();
        let lap = spectral_laplacian(&Array2::from_elem((r, c), 3.5), &mult).unwrap();
        assert!(lap.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn laplacian_eigenmodes_and_linearity() {
        let mult = SpectralMultiplier::for_grid(&grid(4, 5));
        let (r, c) = mult.shape();
        let a = cosine_mode(r, c, 1, 2);
        let b = cosine_mode(r, c, 3, 5);
        let la = spectral_laplacian(&a, &mult).unwrap();
        let lb = spectral_laplacian(&b, &mult).unwrap();
        let ea = mult.values()[[1, 2]];
        let eb = mult.values()[[3, 5]];
        for ((x, y), (&va, &vb)) in la.iter().zip(lb.iter()).zip(a.iter().zip(b.iter())) {
            assert!((x - ea * va).abs() < 1e-9 * ea.abs());
            assert!((y - eb * vb).abs() < 1e-9 * eb.abs());
        }
        let lsum = spectral_laplacian(&(&a + &b), &mult).unwrap();
        for ((s, x), y) in lsum.iter().zip(la.iter()).zip(lb.iter()) {
            assert!((s - x - y).abs() < 1e-9 * eb.abs());
        }
    }

    #[test]
    fn laplacian_rejects_wrong_shape() {
        let mult = SpectralMultiplier::for_grid(&grid(2, 2));
        assert!(matches!(
            spectral_laplacian(&Array2::zeros((3, 3)), &mult),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn poisson_inverts_single_mode_and_zero() {
        let mult = SpectralMultiplier::for_grid(&grid(3, 4));
        let (r, c) = mult.shape();
        let mode = cosine_mode(r, c, 2, 3);
        let scaled = mode.mapv(|v| v * mult.values()[[2, 3]]);
        let back = poisson_solve(&scaled, &mult).unwrap();
        for (x, y) in back.iter().zip(mode.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
        let zero = poisson_solve(&Array2::zeros((r, c)), &mult).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn poisson_round_trip_on_extended_fields() {
        let g = grid(6, 7);
        let base = Array2::from_shape_fn(g.shape(), |(m, n)| {
            let t = g.radial(n);
            let a = g.angle(m);
            (1.0 - t * t) * (1.0 + 0.3 * (2.0 * a).cos() + 0.2 * t * a.sin())
        });
        let ext = ExtendedField::from_array(&g, &base).unwrap();
        let mult = SpectralMultiplier::for_grid(&g);
        let lap = spectral_laplacian(ext.data(), &mult).unwrap();
        let back = poisson_solve(&lap, &mult).unwrap();
        let err = (&back - ext.data()).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn rhs_of_zero_is_zero() {
        let g = grid(3, 4);
        let ext = ExtendedField::from_array(&g, &Array2::zeros(g.shape())).unwrap();
        let rhs = assemble_rhs(&ext, 0.1).unwrap();
        assert!(rhs.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rhs_linearizes_for_small_amplitude() {
        let g = grid(8, 16);
        let mult = SpectralMultiplier::for_grid(&g);
        let (r, c) = mult.shape();
        let lambda = 1.0;
        let eps = 1e-3;
        // odd-in-t, periodic mode so the field is a legitimate extension
        let field = Array2::from_shape_fn((r, c), |(i, j)| {
            eps * (2.0 * PI * i as f64 / r as f64).cos() * (2.0 * PI * 2.0 * j as f64 / c as f64).sin()
        });
        let ext = ExtendedField {
            grid: g,
            data: field.clone(),
        };
        let rhs = assemble_rhs_with(&ext, lambda, &mult).unwrap();
        let lap = spectral_laplacian(&field, &mult).unwrap();
        let scale = lap.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let err = (&rhs - &lap).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(err <= 1e-4 * scale, "{err} vs {scale}");
    }

    #[test]
    fn unfold_of_zero_is_zero() {
        let g = grid(4, 8);
        let mp = fold_sinogram(&Sinogram::zeros(g), 0.5).unwrap();
        let out = lmu_unfold(&mp).unwrap();
        assert!(out.data().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn unfolds_folded_smooth_sinogram() {
        // p(ϑ, t) = A(1 - t²)³(1 + 0.2 cos 2ϑ) folded several times
        let g = SamplingGrid::new(32, 64, 1.0 / 64.0).unwrap();
        let p = Sinogram::from_fn(g, |a, t| 0.5 * (1.0 - t * t).powi(3) * (1.0 + 0.2 * (2.0 * a).cos())).unwrap();
        let mp = fold_sinogram(&p, 0.05).unwrap();
        let lmu = lmu_unfold(&mp).unwrap();
        let err = (lmu.data() - p.data()).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(err < 0.05, "{err}");
        let plus = improve(&lmu, &mp).unwrap();
        assert_eq!(plus.data().iter().zip(p.data().iter()).filter(|(a, b)| (*a - *b).abs() > 1e-12).count(), 0);
    }

    #[test]
    fn improve_examples() {
        let g = grid(1, 2);
        let lambda = 0.1;
        let p = Sinogram::new(g, array![[0.0, 0.15, 0.43, 0.27, -0.05]]).unwrap();
        let mp = fold_sinogram(&p, lambda).unwrap();

        let exact = improve(&p, &mp).unwrap();
        for (a, b) in exact.data().iter().zip(p.data().iter()) {
            assert!((a - b).abs() < 1e-15);
        }

        let near = p.map(|v| v + 0.9 * lambda).unwrap();
        let rec = improve(&near, &mp).unwrap();
        for (a, b) in rec.data().iter().zip(p.data().iter()) {
            assert!((a - b).abs() < 1e-15);
        }

        // error of 1.5λ at one entry rounds to the neighbouring lattice point
        let mut off = p.data().clone();
        off[[0, 2]] += 1.5 * lambda;
        let off = Sinogram::new(g, off).unwrap();
        let rec = improve(&off, &mp).unwrap();
        assert!((rec.data()[[0, 2]] - p.data()[[0, 2]] - 2.0 * lambda).abs() < 1e-12);
        for n in [0, 1, 3, 4] {
            assert!((rec.data()[[0, n]] - p.data()[[0, n]]).abs() < 1e-15);
        }
    }

    #[test]
    fn improve_output_is_congruent_to_folded_data() {
        let g = grid(2, 3);
        let lambda = 0.2;
        let p = Sinogram::from_fn(g, |a, t| 2.0 * (3.0 * a + 5.0 * t).sin()).unwrap();
        let mp = fold_sinogram(&p, lambda).unwrap();
        let junk = Sinogram::from_fn(g, |a, t| 7.0 * (a * t).cos()).unwrap();
        let out = improve(&junk, &mp).unwrap();
        for (o, f) in out.data().iter().zip(mp.data().iter()) {
            let k = (o - f) / (2.0 * lambda);
            assert!((k - k.round()).abs() < 1e-9);
        }
    }
}
