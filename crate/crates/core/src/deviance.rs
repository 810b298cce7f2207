//! Unit deviances `d(y; mu) = {1 - phi(y - mu)} |psi(y - mu)|` built from a
//! pair of characteristic functions, plus axiom and regularity probes.

use serde::{Deserialize, Serialize};

use crate::charfn::CharFn;
use crate::error::{Error, Result};

/// Absolute tolerance for `d(mu; mu)`.
pub const DIAGONAL_TOL: f64 = 1e-14;

/// Slope mismatch above `KINK_FACTOR * h` counts as a corner.
pub const KINK_FACTOR: f64 = 100.0;

/// The ordered pair `(phi, psi)`. `phi` enters through `1 - phi`, `psi`
/// through the modulus factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitDeviance {
    pub phi: CharFn,
    pub psi: CharFn,
}

impl UnitDeviance {
    pub fn new(phi: CharFn, psi: CharFn) -> Result<Self> {
        let pair = UnitDeviance { phi, psi };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        self.phi.validate()?;
        self.psi.validate()
    }

    /// Deviance as a function of the residual `t = y - mu`.
    #[inline]
    pub fn at_residual(&self, t: f64) -> f64 {
        self.phi.one_minus_eval(t) * self.psi.eval(t).abs()
    }

    #[inline]
    pub fn eval(&self, y: f64, mu: f64) -> f64 {
        self.at_residual(y - mu)
    }

    pub fn is_regular(&self) -> bool {
        self.phi.has_finite_second_moment() && self.psi.has_finite_second_moment()
    }

    /// Scans `grid x grid` for the unit deviance axioms.
    pub fn check_axioms(&self, grid: &Grid) -> Result<AxiomReport> {
        check_unit_deviance_with(|y, mu| self.eval(y, mu), grid)
    }

    /// Finite-difference regularity probe at `y = mu`.
    pub fn regularity_probe(&self, mu: f64, h: f64) -> Result<RegularityReport> {
        if !(h > 0.0 && h <= 1e-2) {
            return Err(Error::Domain {
                name: "h",
                value: h,
                lo: 0.0,
                hi: 1e-2,
            });
        }
        let y = mu;
        let center = self.eval(y, mu);
        let plus = self.eval(y, mu + h);
        let minus = self.eval(y, mu - h);
        let second = (plus - 2.0 * center + minus) / (h * h);
        let right_slope = (plus - center) / h;
        let left_slope = (center - minus) / h;
        Ok(RegularityReport {
            second_derivative_at_diagonal: second,
            left_slope,
            right_slope,
            is_regular: self.is_regular(),
            kink_detected: (left_slope - right_slope).abs() > KINK_FACTOR * h,
        })
    }
}

/// Square evaluation grid; the same points serve as `y` and `mu` axes so the
/// diagonal is always present.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("grid", "no points"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("grid", "non-finite point"));
        }
        Ok(Grid { points })
    }

    /// `n` evenly spaced points over `[lo, hi]`, endpoints included.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || n < 2 {
            return Err(Error::invalid(
                "grid",
                format!("need lo < hi and n >= 2, got [{lo}, {hi}], n = {n}"),
            ));
        }
        Grid::new(symmetric_points(lo, hi, n))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// `n` points over `[lo, hi]` laid out so that the grid is exactly mirror
/// symmetric about the midpoint.
pub fn symmetric_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| center + half * ((2 * i) as f64 - m) / m)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    ZeroOnDiagonal,
    PositiveOffDiagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub y: f64,
    pub mu: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub max_abs_diagonal: f64,
    pub min_off_diagonal: f64,
    pub points_checked: usize,
    /// First few offending `(y, mu)` pairs.
    pub violations: Vec<AxiomViolation>,
}

const MAX_WITNESSES: usize = 16;

/// Axiom scan for an arbitrary deviance-like function `d(y, mu)`.
pub fn check_unit_deviance_with<F>(d: F, grid: &Grid) -> Result<AxiomReport>
where
    F: Fn(f64, f64) -> f64,
{
    let pts = grid.points();
    let mut max_abs_diagonal = 0.0f64;
    let mut min_off_diagonal = f64::INFINITY;
    let mut violations = Vec::new();
    let mut failed = false;
    let mut record = |v: AxiomViolation| {
        failed = true;
        if violations.len() < MAX_WITNESSES {
            violations.push(v);
        }
    };
    for &y in pts {
        for &mu in pts {
            let value = d(y, mu);
            if y == mu {
                max_abs_diagonal = max_abs_diagonal.max(value.abs());
                if !(value.abs() <= DIAGONAL_TOL) {
                    record(AxiomViolation {
                        axiom: Axiom::ZeroOnDiagonal,
                        y,
                        mu,
                        value,
                    });
                }
            } else {
                min_off_diagonal = min_off_diagonal.min(value);
                if !(value > 0.0) {
                    record(AxiomViolation {
                        axiom: Axiom::PositiveOffDiagonal,
                        y,
                        mu,
                        value,
                    });
                }
            }
        }
    }
    Ok(AxiomReport {
        passed: !failed,
        max_abs_diagonal,
        min_off_diagonal,
        points_checked: pts.len() * pts.len(),
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub second_derivative_at_diagonal: f64,
    pub left_slope: f64,
    pub right_slope: f64,
    pub is_regular: bool,
    pub kink_detected: bool,
}
