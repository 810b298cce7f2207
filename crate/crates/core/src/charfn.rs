//! Real characteristic functions of symmetric, non-lattice, absolutely
//! continuous distributions.
//!
//! Every family here has a closed form that is real, even and strictly below
//! one away from the origin. New families are added as further variants of
//! [`CharFn`]; everything downstream only needs [`CharFn::eval`],
//! [`CharFn::one_minus_eval`] and [`CharFn::has_finite_second_moment`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arguments are clamped to this magnitude before evaluation.
pub const T_CAP: f64 = 1e8;

/// A parametric characteristic function.
///
/// Serializes as `{"family": "...", "params": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum CharFn {
    /// `exp(-sigma^2 t^2 / 2)`
    Normal { sigma: f64 },
    /// `exp(-gamma |t|)`
    Cauchy { gamma: f64 },
    /// `1 / (1 + b^2 t^2)`
    Laplace { b: f64 },
    /// `exp(-|c t|^alpha)`, `0 < alpha <= 2`
    #[serde(rename = "stable")]
    SymmetricStable { alpha: f64, c: f64 },
    /// Normal inverse Gaussian with zero asymmetry:
    /// `exp(delta (alpha - sqrt(alpha^2 + t^2)))`
    #[serde(rename = "nig")]
    SymmetricNig { alpha: f64, delta: f64 },
}

impl CharFn {
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    "characteristic function",
                    format!("{name} must be finite and > 0, got {v}"),
                ))
            }
        }
        match *self {
            CharFn::Normal { sigma } => positive("sigma", sigma),
            CharFn::Cauchy { gamma } => positive("gamma", gamma),
            CharFn::Laplace { b } => positive("b", b),
            CharFn::SymmetricStable { alpha, c } => {
                if !(alpha.is_finite() && alpha > 0.0 && alpha <= 2.0) {
                    return Err(Error::invalid(
                        "characteristic function",
                        format!("stable index alpha must lie in (0, 2], got {alpha}"),
                    ));
                }
                positive("c", c)
            }
            CharFn::SymmetricNig { alpha, delta } => {
                positive("alpha", alpha)?;
                positive("delta", delta)
            }
        }
    }

    /// Value of the characteristic function at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(-T_CAP, T_CAP);
        match *self {
            CharFn::Laplace { b } => 1.0 / (1.0 + (b * t) * (b * t)),
            _ => (-self.exponent(t)).exp(),
        }
    }

    /// `1 - eval(t)`, computed without cancellation near the origin.
    pub fn one_minus_eval(&self, t: f64) -> f64 {
        let t = t.clamp(-T_CAP, T_CAP);
        match *self {
            CharFn::Laplace { b } => {
                let u = (b * t) * (b * t);
                u / (1.0 + u)
            }
            _ => -(-self.exponent(t)).exp_m1(),
        }
    }

    /// `-ln eval(t)` for the exponential families.
    fn exponent(&self, t: f64) -> f64 {
        match *self {
            CharFn::Normal { sigma } => 0.5 * (sigma * t) * (sigma * t),
            CharFn::Cauchy { gamma } => gamma * t.abs(),
            CharFn::SymmetricStable { alpha, c } => (c * t).abs().powf(alpha),
            CharFn::SymmetricNig { alpha, delta } => {
                // delta * (sqrt(alpha^2 + t^2) - alpha), rationalized
                delta * t * t / ((alpha * alpha + t * t).sqrt() + alpha)
            }
            CharFn::Laplace { b } => (1.0 + (b * t) * (b * t)).ln(),
        }
    }

    /// Whether the underlying distribution has finite variance.
    pub fn has_finite_second_moment(&self) -> bool {
        match *self {
            CharFn::Normal { .. } | CharFn::Laplace { .. } | CharFn::SymmetricNig { .. } => true,
            CharFn::Cauchy { .. } => false,
            CharFn::SymmetricStable { alpha, .. } => alpha == 2.0,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            CharFn::Normal { .. } => "normal",
            CharFn::Cauchy { .. } => "cauchy",
            CharFn::Laplace { .. } => "laplace",
            CharFn::SymmetricStable { .. } => "stable",
            CharFn::SymmetricNig { .. } => "nig",
        }
    }
}

impl fmt::Display for CharFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CharFn::Normal { sigma } => write!(f, "normal:{sigma}"),
            CharFn::Cauchy { gamma } => write!(f, "cauchy:{gamma}"),
            CharFn::Laplace { b } => write!(f, "laplace:{b}"),
            CharFn::SymmetricStable { alpha, c } => write!(f, "stable:{alpha},{c}"),
            CharFn::SymmetricNig { alpha, delta } => write!(f, "nig:{alpha},{delta}"),
        }
    }
}

/// Parses `FAMILY:PARAMS`, e.g. `normal:1`, `stable:1.5,1`, `nig:1,1`.
///
/// The result is validated.
impl FromStr for CharFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::invalid("characteristic function", reason);
        let (family, params) = s
            .split_once(':')
            .ok_or_else(|| bad(format!("expected FAMILY:PARAMS, got `{s}`")))?;
        let values = params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("`{p}` is not a number in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let arity = |n: usize| {
            if values.len() == n {
                Ok(())
            } else {
                Err(bad(format!(
                    "family `{family}` takes {n} parameter(s), got {}",
                    values.len()
                )))
            }
        };
        let spec = match family.trim().to_ascii_lowercase().as_str() {
            "normal" => {
                arity(1)?;
                CharFn::Normal { sigma: values[0] }
            }
            "cauchy" => {
                arity(1)?;
                CharFn::Cauchy { gamma: values[0] }
            }
            "laplace" => {
                arity(1)?;
                CharFn::Laplace { b: values[0] }
            }
            "stable" => {
                arity(2)?;
                CharFn::SymmetricStable {
                    alpha: values[0],
                    c: values[1],
                }
            }
            "nig" => {
                arity(2)?;
                CharFn::SymmetricNig {
                    alpha: values[0],
                    delta: values[1],
                }
            }
            other => return Err(bad(format!("unknown family `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}
