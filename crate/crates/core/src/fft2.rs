//! Row/column 2-D complex DFT on top of `rustfft`.

use std::sync::Arc;

use ndarray::{Array2, Axis, Zip};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse plans for one `(rows, cols)` shape. Read-only after
/// construction, so it can be shared across threads.
#[derive(Clone)]
pub(crate) struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut Array2<Complex64>) {
        self.apply(data, &self.row_fwd, &self.col_fwd);
    }

    /// Inverse transform including the `1/(rows·cols)` factor, in place.
    pub fn inverse(&self, data: &mut Array2<Complex64>) {
        self.apply(data, &self.row_inv, &self.col_inv);
        let scale = 1.0 / (self.rows * self.cols) as f64;
        data.par_mapv_inplace(|v| v * scale);
    }

    fn apply(&self, data: &mut Array2<Complex64>, row_plan: &Arc<dyn Fft<f64>>, col_plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.dim(), (self.rows, self.cols), "FFT plan shape mismatch");
        transform_lanes(data, row_plan);
        let mut transposed = data.t().as_standard_layout().into_owned();
        transform_lanes(&mut transposed, col_plan);
        data.assign(&transposed.t());
    }
}

fn transform_lanes(data: &mut Array2<Complex64>, plan: &Arc<dyn Fft<f64>>) {
    let scratch_len = plan.get_inplace_scratch_len();
    Zip::from(data.axis_iter_mut(Axis(0))).par_for_each(|mut lane| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
        let slice = lane.as_slice_mut().expect("standard layout rows");
        plan.process_with_scratch(slice, &mut scratch);
    });
}

/// Signed frequency index of DFT bin `k` out of `n`.
pub(crate) fn signed_frequency(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}
