//! Analytic test objects with closed-form Radon transforms.
//!
//! Lines are parameterized as `{x : x·θ = t}` with `θ = (cos ϑ, sin ϑ)`,
//! so `Rf(ϑ, t) = ∫ f(tθ + sθ⊥) ds`.

use ndarray::{Array2, Axis, Zip};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::grid::{pixel_center, Image, SamplingGrid, Sinogram};

/// Constant-intensity ellipse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub center: [f64; 2],
    /// Semi-axes `(a, b)` before rotation; `a` lies along the x axis.
    pub axes: [f64; 2],
    /// Counter-clockwise rotation in radians.
    #[serde(default)]
    pub rotation: f64,
    pub intensity: f64,
}

impl Ellipse {
    pub fn new(center: [f64; 2], axes: [f64; 2], rotation: f64, intensity: f64) -> Result<Self> {
        let e = Self {
            center,
            axes,
            rotation,
            intensity,
        };
        e.validate()?;
        Ok(e)
    }

    fn validate(&self) -> Result<()> {
        let [a, b] = self.axes;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::invalid("axes", format!("semi-axes must be positive, got ({a}, {b})")));
        }
        if !(self.intensity.is_finite() && self.rotation.is_finite()) {
            return Err(Error::invalid("ellipse", "intensity and rotation must be finite"));
        }
        let reach = norm(self.center) + a.max(b);
        if reach > 1.0 + 1e-12 {
            return Err(Error::invalid(
                "ellipse",
                format!("|center| + max semi-axis = {reach} leaves the unit ball"),
            ));
        }
        Ok(())
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let (s, c) = self.rotation.sin_cos();
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let u = c * dx + s * dy;
        let v = -s * dx + c * dy;
        let [a, b] = self.axes;
        if (u / a).powi(2) + (v / b).powi(2) < 1.0 {
            self.intensity
        } else {
            0.0
        }
    }

    /// Chord length times intensity.
    pub fn radon(&self, angle: f64, t: f64) -> f64 {
        let [a, b] = self.axes;
        let (s, c) = angle.sin_cos();
        let u = t - (self.center[0] * c + self.center[1] * s);
        let rel = angle - self.rotation;
        let a2 = (a * rel.cos()).powi(2) + (b * rel.sin()).powi(2);
        let gap = a2 - u * u;
        if gap <= 0.0 {
            0.0
        } else {
            2.0 * self.intensity * a * b * gap.sqrt() / a2
        }
    }
}

/// `intensity·(1 - |x - c|²/r²)₊^ν`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothBump {
    pub center: [f64; 2],
    pub radius: f64,
    pub intensity: f64,
    pub nu: f64,
}

impl SmoothBump {
    pub fn new(center: [f64; 2], radius: f64, intensity: f64, nu: f64) -> Result<Self> {
        let b = Self {
            center,
            radius,
            intensity,
            nu,
        };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("radius", format!("must be positive, got {}", self.radius)));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid("nu", format!("smoothness must be positive, got {}", self.nu)));
        }
        if !self.intensity.is_finite() {
            return Err(Error::invalid("intensity", "must be finite"));
        }
        let reach = norm(self.center) + self.radius;
        if reach >= 1.0 {
            return Err(Error::invalid(
                "bump",
                format!("support reaches |x| = {reach}; it must stay inside the open unit ball"),
            ));
        }
        Ok(())
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let d2 = (x[0] - self.center[0]).powi(2) + (x[1] - self.center[1]).powi(2);
        let w = 1.0 - d2 / (self.radius * self.radius);
        if w <= 0.0 {
            0.0
        } else {
            self.intensity * w.powf(self.nu)
        }
    }

    /// `intensity·r·B(1/2, ν+1)·(1 - s²)₊^(ν+1/2)` with `s` the line's
    /// distance to the centre in units of `r`.
    pub fn radon(&self, angle: f64, t: f64) -> f64 {
        let (sn, cs) = angle.sin_cos();
        let s = (t - (self.center[0] * cs + self.center[1] * sn)) / self.radius;
        let w = 1.0 - s * s;
        if w <= 0.0 {
            0.0
        } else {
            self.intensity * self.radius * beta(0.5, self.nu + 1.0) * w.powf(self.nu + 0.5)
        }
    }
}

/// Euler beta function via log-gamma.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// One additive phantom component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Component {
    Ellipse(Ellipse),
    Bump(SmoothBump),
}

impl Component {
    pub fn validate(&self) -> Result<()> {
        match self {
            Component::Ellipse(e) => e.validate(),
            Component::Bump(b) => b.validate(),
        }
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        match self {
            Component::Ellipse(e) => e.value(x),
            Component::Bump(b) => b.value(x),
        }
    }

    pub fn radon(&self, angle: f64, t: f64) -> f64 {
        match self {
            Component::Ellipse(e) => e.radon(angle, t),
            Component::Bump(b) => b.radon(angle, t),
        }
    }
}

/// Sum of components supported in the unit ball.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Phantom {
    #[serde(rename = "component", default)]
    components: Vec<Component>,
}

impl Phantom {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        for c in &components {
            c.validate()?;
        }
        Ok(Self { components })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Modified Shepp-Logan head phantom (ten ellipses, unit outer intensity).
    pub fn shepp_logan() -> Self {
        // (intensity, a, b, x0, y0, rotation in degrees)
        const TABLE: [(f64, f64, f64, f64, f64, f64); 10] = [
            (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
            (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
            (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
            (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
            (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
            (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
            (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
            (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
            (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
            (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
        ];
        let components = TABLE
            .iter()
            .map(|&(i, a, b, x, y, deg)| {
                Component::Ellipse(Ellipse {
                    center: [x, y],
                    axes: [a, b],
                    rotation: deg.to_radians(),
                    intensity: i,
                })
            })
            .collect();
        Self { components }
    }

    /// Smooth phantom built from `ν = 2.5` bumps: one large body with two
    /// brighter inclusions and a darker one. Its sinogram peaks near 0.75.
    pub fn smooth() -> Self {
        const NU: f64 = 2.5;
        // (x0, y0, radius, intensity)
        const TABLE: [(f64, f64, f64, f64); 4] = [
            (0.0, 0.0, 0.75, 0.7),
            (0.28, 0.3, 0.32, 0.45),
            (-0.3, -0.22, 0.26, 0.35),
            (0.1, -0.45, 0.2, -0.3),
        ];
        let components = TABLE
            .iter()
            .map(|&(x, y, r, i)| {
                Component::Bump(SmoothBump {
                    center: [x, y],
                    radius: r,
                    intensity: i,
                    nu: NU,
                })
            })
            .collect();
        Self { components }
    }

    /// Sum of component values at `x`.
    pub fn value(&self, x: [f64; 2]) -> f64 {
        if norm(x) >= 1.0 {
            return 0.0;
        }
        self.components.iter().map(|c| c.value(x)).sum()
    }

    /// Exact line integral along `{x·θ(ϑ) = t}`.
    pub fn radon(&self, angle: f64, t: f64) -> f64 {
        if t.abs() >= 1.0 {
            return 0.0;
        }
        self.components.iter().map(|c| c.radon(angle, t)).sum()
    }

    /// Analytic sinogram on `grid`.
    pub fn sinogram(&self, grid: &SamplingGrid) -> Sinogram {
        let mut data = Array2::zeros(grid.shape());
        Zip::indexed(data.axis_iter_mut(Axis(0))).par_for_each(|m, mut row| {
            let angle = grid.angle(m);
            for (n, v) in row.iter_mut().enumerate() {
                *v = self.radon(angle, grid.radial(n));
            }
        });
        Sinogram::new(*grid, data).expect("analytic projections are finite")
    }

    /// Samples the phantom at the pixel centres of a `width × height` raster.
    pub fn rasterize(&self, width: usize, height: usize) -> Image {
        let (w, h) = (width.max(1), height.max(1));
        let mut data = Array2::zeros((h, w));
        Zip::indexed(data.axis_iter_mut(Axis(0))).par_for_each(|j, mut row| {
            let y = pixel_center(j, h);
            for (i, v) in row.iter_mut().enumerate() {
                *v = self.value([pixel_center(i, w), y]);
            }
        });
        Image::new(data).expect("phantom values are finite")
    }
}

fn norm(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}
