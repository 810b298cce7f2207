//! The kernel `K(y) = exp(-lambda d(y; 0))` and the truncated support window.

use serde::{Deserialize, Serialize};

use crate::deviance::{symmetric_points, UnitDeviance};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Integral};

/// Default absolute tolerance for plain integrals.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default absolute tolerance for residual curves.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub deviance: UnitDeviance,
    /// Index parameter. Zero is accepted as the degenerate `K == 1` limit.
    pub lambda: f64,
}

impl Kernel {
    pub fn new(deviance: UnitDeviance, lambda: f64) -> Result<Self> {
        let k = Kernel { deviance, lambda };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        self.deviance.validate()?;
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::invalid(
                "kernel",
                format!("lambda must be finite and >= 0, got {}", self.lambda),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        (-self.lambda * self.deviance.at_residual(y)).exp()
    }

    /// Lower bound `exp(-2 lambda)`, valid everywhere since `d <= 2`.
    pub fn lower_bound(&self) -> f64 {
        (-2.0 * self.lambda).exp()
    }

    /// `int_window K(z) dz`.
    pub fn integral(&self, window: &Window, tol: f64) -> Result<Integral> {
        self.integral_centered(window, 0.0, tol)
    }

    /// `int_window K(z - center) dz`, with `center` as a panel boundary.
    pub fn integral_centered(&self, window: &Window, center: f64, tol: f64) -> Result<Integral> {
        integrate(|z| self.eval(z - center), window.lo, window.hi, &[center], tol)
    }
}

/// Truncated support `[lo, hi]` with a grid size for discrete operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub n_grid: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            lo: -20.0,
            hi: 20.0,
            n_grid: 4096,
        }
    }
}

impl Window {
    pub const MIN_GRID: usize = 16;

    pub fn new(lo: f64, hi: f64, n_grid: usize) -> Result<Self> {
        let w = Window { lo, hi, n_grid };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo) {
            return Err(Error::invalid(
                "window",
                format!("need finite lo < hi, got [{}, {}]", self.lo, self.hi),
            ));
        }
        if self.n_grid < Self::MIN_GRID {
            return Err(Error::invalid(
                "window",
                format!("n_grid must be >= {}, got {}", Self::MIN_GRID, self.n_grid),
            ));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= self.lo && y <= self.hi
    }

    pub fn shifted(&self, c: f64) -> Window {
        Window {
            lo: self.lo + c,
            hi: self.hi + c,
            ..*self
        }
    }

    /// The middle half `[lo + w/4, hi - w/4]`.
    pub fn middle_half(&self) -> (f64, f64) {
        let q = 0.25 * self.width();
        (self.lo + q, self.hi - q)
    }

    /// `factor * n_grid + 1` mirror-symmetric points spanning the window.
    pub fn oversampled(&self, factor: usize) -> Vec<f64> {
        symmetric_points(self.lo, self.hi, factor * self.n_grid + 1)
    }

    pub(crate) fn require(&self, name: &'static str, value: f64) -> Result<()> {
        if self.contains(value) {
            Ok(())
        } else {
            Err(Error::Domain {
                name,
                value,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}
