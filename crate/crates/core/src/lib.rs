//! Modulo Radon transform toolkit.
//!
//! Forward model `p^λ = M^λ(Rf)` for self-resetting (folding) detectors, and
//! its inversion by Laplacian modulo unfolding (a spectral Poisson solve on the
//! doubled sinogram torus) followed by filtered back projection. A first-order
//! unlimited-sampling unfolder is included as a baseline.

pub mod error;
pub mod experiment;
mod fft2;
pub mod grid;
pub mod io;
pub mod lmu;
pub mod modulo;
pub mod phantom;
pub mod metrics;
pub mod radon;
pub mod usfbp;

#[cfg(test)]
mod oracle;

pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutput, Method, Unfolding};
pub use grid::{Image, ModuloSinogram, SamplingGrid, Sinogram};
pub use phantom::Phantom;
pub use radon::{FilterSpec, Window};
