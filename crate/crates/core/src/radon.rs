//! Discrete filtered back projection.
//!
//! Fourier convention: `Fg(σ) = ∫ g(t) e^{-iσt} dt`, inverse with `1/2π`.
//! The reconstruction is `f ≈ (1/4π)·B(A_L * Rf)` where `F A_L(S) = |S|·W(S/L)`.
//! Rows are filtered at `t_i = i·T` for `|i| ≤ ⌈√2/T⌉ + 1`, enough to cover
//! every `x·θ` with `x ∈ [-1, 1]²`, then back projected with weight `1/(2M)`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use ndarray::{Array2, ArrayView2, Axis, Zip};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{pixel_center, Image, SamplingGrid, Sinogram};

/// Apodization window `W` of the ramp filter, supported in `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    /// `W ≡ 1`
    RamLak,
    /// `W(S) = cos(πS/2)`
    Cosine,
    /// `W(S) = sin(πS/2)/(πS/2)`
    SheppLogan,
}

impl Window {
    pub fn eval(self, s: f64) -> f64 {
        if s.abs() > 1.0 {
            return 0.0;
        }
        match self {
            Window::RamLak => 1.0,
            Window::Cosine => (PI * s / 2.0).cos(),
            Window::SheppLogan => {
                let x = PI * s / 2.0;
                if x == 0.0 {
                    1.0
                } else {
                    x.sin() / x
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::RamLak => "ramlak",
            Window::Cosine => "cosine",
            Window::SheppLogan => "shepplogan",
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "ramlak" => Ok(Window::RamLak),
            "cosine" => Ok(Window::Cosine),
            "shepplogan" => Ok(Window::SheppLogan),
            other => Err(Error::invalid("filter", format!("unknown window `{other}`"))),
        }
    }
}

/// Low-pass FBP filter: window family and bandwidth `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub window: Window,
    pub bandwidth: f64,
}

impl FilterSpec {
    pub fn new(window: Window, bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::invalid("bandwidth", format!("must be positive, got {bandwidth}")));
        }
        Ok(Self { window, bandwidth })
    }

    /// Cosine window with `L = M`, the setting used for all reconstructions
    /// in the reference experiments.
    pub fn cosine_for(grid: &SamplingGrid) -> Self {
        Self {
            window: Window::Cosine,
            bandwidth: grid.angles() as f64,
        }
    }
}

/// `F⁻¹A_L(t) = (1/2π) ∫_{-L}^{L} |S| W(S/L) e^{iSt} dS`, in closed form.
pub fn fbp_kernel(filter: &FilterSpec, t: f64) -> f64 {
    let l = filter.bandwidth;
    match filter.window {
        Window::RamLak => ramp_cosine_integral(t, l) / PI,
        Window::Cosine => {
            let w = PI / (2.0 * l);
            (ramp_cosine_integral(t + w, l) + ramp_cosine_integral(t - w, l)) / (2.0 * PI)
        }
        Window::SheppLogan => {
            let w = PI / (2.0 * l);
            (one_minus_cos_ratio(w + t, l) + one_minus_cos_ratio(w - t, l)) / (2.0 * PI * w)
        }
    }
}

/// `∫_0^L S cos(aS) dS`
fn ramp_cosine_integral(a: f64, l: f64) -> f64 {
    let x = a * l;
    if x.abs() < 0.5 {
        // Σ_k (-1)^k x^{2k} / ((2k)! (2k + 2)) · L²
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.5;
        for k in 1..10 {
            term *= -x2 / ((2 * k - 1) * (2 * k)) as f64;
            sum += term / (2 * k + 2) as f64;
        }
        sum * l * l
    } else {
        let half = (x / 2.0).sin();
        l * x.sin() / a - 2.0 * half * half / (a * a)
    }
}

/// `∫_0^L sin(aS) dS = (1 - cos(aL))/a`
fn one_minus_cos_ratio(a: f64, l: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        let half = (a * l / 2.0).sin();
        2.0 * half * half / a
    }
}

/// Kernel samples `F⁻¹A_L(d·T)` for `d` in `[-reach, reach]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTable {
    spacing: f64,
    reach: usize,
    values: Vec<f64>,
}

impl KernelTable {
    /// Evaluates the kernel for `d ≥ 0` and mirrors it, so the table is even
    /// bit for bit.
    pub fn new(filter: &FilterSpec, spacing: f64, reach: usize) -> Self {
        let half: Vec<f64> = (0..=reach).map(|d| fbp_kernel(filter, d as f64 * spacing)).collect();
        let mut values = Vec::with_capacity(2 * reach + 1);
        values.extend(half.iter().rev());
        values.extend(half.iter().skip(1));
        Self {
            spacing,
            reach,
            values,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn reach(&self) -> usize {
        self.reach
    }

    /// Kernel at offset `d·T`; zero beyond the table.
    pub fn at(&self, d: i64) -> f64 {
        if d.unsigned_abs() as usize > self.reach {
            0.0
        } else {
            self.values[(d + self.reach as i64) as usize]
        }
    }

    /// Samples from offset `-reach` to `+reach`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Half-width of the output index set: `⌈√2/T⌉ + 1`.
pub fn output_half_width(spacing: f64) -> usize {
    (SQRT_2 / spacing).ceil() as usize + 1
}

/// Filtered projections `h(ϑ_m, t_i)` at `t_i = i·T`, `i = -I..=I`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredTable {
    angles: Vec<f64>,
    spacing: f64,
    half_width: usize,
    data: Array2<f64>,
}

impl FilteredTable {
    pub fn new(angles: Vec<f64>, spacing: f64, data: Array2<f64>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if rows != angles.len() || cols % 2 == 0 {
            return Err(Error::DimensionMismatch {
                expected: (angles.len(), cols | 1),
                found: (rows, cols),
            });
        }
        Ok(Self {
            angles,
            spacing,
            half_width: cols / 2,
            data,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `I` in `t_i = i·T, |i| ≤ I`.
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    /// Abscissa of column `c`.
    pub fn abscissa(&self, c: usize) -> f64 {
        (c as f64 - self.half_width as f64) * self.spacing
    }
}

/// Step 6 convolution `h(ϑ_m, t_i) = T Σ_n F⁻¹A_L(t_i - t_n) p[m, n]`,
/// evaluated row by row through an FFT of the zero-padded kernel.
pub fn convolve_rows(sinogram: &Sinogram, filter: &FilterSpec) -> FilteredTable {
    let grid = sinogram.grid();
    convolve_lines(sinogram.data().view(), grid.angle_values(), grid.spacing(), filter)
}

/// Same as [`convolve_rows`] for rows at arbitrary angles; each row holds
/// `2K + 1` samples centred on `t = 0`.
pub fn convolve_lines(rows: ArrayView2<f64>, angles: Vec<f64>, spacing: f64, filter: &FilterSpec) -> FilteredTable {
    let (count, n) = rows.dim();
    assert_eq!(count, angles.len(), "one angle per row");
    assert!(n % 2 == 1, "rows must have odd length");
    let k = n / 2;
    let half = output_half_width(spacing);
    let out_len = 2 * half + 1;
    // kernel offsets d = i - j range over [-(half + K), half + K]
    let kernel = KernelTable::new(filter, spacing, half + k);
    let taps = kernel.values().len();
    let size = fast_length(taps);
    let mut planner = FftPlanner::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(size);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(size);

    let mut spectrum = vec![Complex64::new(0.0, 0.0); size];
    for (slot, &v) in spectrum.iter_mut().zip(kernel.values()) {
        *slot = Complex64::new(v, 0.0);
    }
    fwd.process(&mut spectrum);
    // fold T and the 1/size normalization into the kernel spectrum
    let scale = spacing / size as f64;
    spectrum.iter_mut().for_each(|v| *v *= scale);

    let mut data = Array2::zeros((count, out_len));
    Zip::from(data.axis_iter_mut(Axis(0)))
        .and(rows.axis_iter(Axis(0)))
        .par_for_each(|mut out, row| {
            let mut buf = vec![Complex64::new(0.0, 0.0); size];
            for (slot, &v) in buf.iter_mut().zip(row.iter()) {
                *slot = Complex64::new(v, 0.0);
            }
            fwd.process(&mut buf);
            for (b, s) in buf.iter_mut().zip(&spectrum) {
                *b *= s;
            }
            inv.process(&mut buf);
            // output index i sits at linear-convolution index i + half + 2K
            for (c, o) in out.iter_mut().enumerate() {
                *o = buf[c + 2 * k].re;
            }
        });
    FilteredTable {
        angles,
        spacing,
        half_width: half,
        data,
    }
}

/// Smallest `2^a 3^b 5^c ≥ n`.
fn fast_length(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p2 = 1;
    while p2 < best {
        let mut p3 = p2;
        while p3 < best {
            let mut p5 = p3;
            while p5 < n {
                p5 *= 5;
            }
            best = best.min(p5);
            p3 *= 3;
        }
        p2 *= 2;
    }
    best
}

/// Interpolation `𝕴` used to read the filtered table during back projection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Nearest,
    #[default]
    Linear,
}

/// What to do when a pixel projects outside the filtered table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutsideTable {
    #[default]
    Error,
    Zero,
}

/// Step 7: `f[i, j] = (1/2R) Σ_m 𝕴h(ϑ_m, x_i cos ϑ_m + y_j sin ϑ_m)` with `R`
/// the number of table rows.
pub fn back_project(
    table: &FilteredTable,
    width: usize,
    height: usize,
    interpolation: Interpolation,
    outside: OutsideTable,
) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("size", "image dimensions must be positive"));
    }
    let rows = table.angles.len();
    let trig: Vec<(f64, f64)> = table.angles.iter().map(|a| a.sin_cos()).map(|(s, c)| (c, s)).collect();
    let inv_t = 1.0 / table.spacing;
    let offset = table.half_width as f64;
    let last = table.data.ncols() - 1;
    let weight = 1.0 / (2.0 * rows as f64);

    let mut out = Array2::zeros((height, width));
    let failure = std::sync::Mutex::new(None);
    Zip::indexed(out.axis_iter_mut(Axis(0))).par_for_each(|j, mut line| {
        let y = pixel_center(j, height);
        for (i, px) in line.iter_mut().enumerate() {
            let x = pixel_center(i, width);
            let mut acc = 0.0;
            for (m, &(c, s)) in trig.iter().enumerate() {
                let u = (x * c + y * s) * inv_t + offset;
                let h = table.data.row(m);
                let value = match interpolation {
                    Interpolation::Linear => {
                        let f = u.floor();
                        if f < 0.0 || f as usize >= last {
                            if f as usize == last && u == f {
                                h[last]
                            } else {
                                match outside {
                                    OutsideTable::Zero => 0.0,
                                    OutsideTable::Error => {
                                        failure.lock().unwrap().get_or_insert(u);
                                        0.0
                                    }
                                }
                            }
                        } else {
                            let k = f as usize;
                            let frac = u - f;
                            h[k] + frac * (h[k + 1] - h[k])
                        }
                    }
                    Interpolation::Nearest => {
                        let r = u.round();
                        if r < 0.0 || r as usize > last {
                            match outside {
                                OutsideTable::Zero => 0.0,
                                OutsideTable::Error => {
                                    failure.lock().unwrap().get_or_insert(u);
                                    0.0
                                }
                            }
                        } else {
                            h[r as usize]
                        }
                    }
                };
                acc += value;
            }
            *px = weight * acc;
        }
    });
    if let Some(u) = failure.into_inner().unwrap() {
        return Err(Error::OutOfTable {
            abscissa: (u - offset) * table.spacing,
            lo: table.abscissa(0),
            hi: table.abscissa(last),
        });
    }
    Image::new(out)
}

/// Filtered back projection with linear interpolation.
pub fn fbp_reconstruct(sinogram: &Sinogram, filter: &FilterSpec, width: usize, height: usize) -> Result<Image> {
    fbp_reconstruct_with(sinogram, filter, width, height, Interpolation::Linear)
}

pub fn fbp_reconstruct_with(
    sinogram: &Sinogram,
    filter: &FilterSpec,
    width: usize,
    height: usize,
    interpolation: Interpolation,
) -> Result<Image> {
    let table = convolve_rows(sinogram, filter);
    back_project(&table, width, height, interpolation, OutsideTable::Error)
}

/// Numeric line integrals of a raster: composite trapezoid over
/// `s ∈ [-√2, √2]` of the bilinearly interpolated image.
pub fn forward_project_image(image: &Image, grid: &SamplingGrid, ray_samples: usize) -> Result<Sinogram> {
    if ray_samples < 2 {
        return Err(Error::invalid("raysamples", "need at least two samples per ray"));
    }
    let h = 2.0 * SQRT_2 / (ray_samples - 1) as f64;
    let mut data = Array2::zeros(grid.shape());
    Zip::indexed(data.axis_iter_mut(Axis(0))).par_for_each(|m, mut row| {
        let (sn, cs) = grid.angle(m).sin_cos();
        for (n, v) in row.iter_mut().enumerate() {
            let t = grid.radial(n);
            let mut acc = 0.0;
            for k in 0..ray_samples {
                let s = -SQRT_2 + k as f64 * h;
                let w = if k == 0 || k == ray_samples - 1 { 0.5 } else { 1.0 };
                acc += w * image.bilinear(t * cs - s * sn, t * sn + s * cs);
            }
            *v = acc * h;
        }
    });
    Sinogram::new(*grid, data)
}
