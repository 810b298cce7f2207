use thiserror::Error;

/// Errors produced while building or evaluating a dispersion model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("{name} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error(
        "quadrature did not converge after {panels} panels: estimate {estimate:e}, error bound {error_bound:e} > tol {tol:e}"
    )]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        tol: f64,
        panels: usize,
    },

    #[error("normalizer is not positive at y = {y}: value {value}")]
    Positivity { y: f64, value: f64 },

    #[error("kernel transform coefficient {index} is near zero ({magnitude:e})")]
    IllConditioned { index: usize, magnitude: f64 },

    #[error("rejection envelope {envelope} exceeded: density {density} at y = {y}")]
    Envelope { y: f64, density: f64, envelope: f64 },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::IllConditioned { .. } | Error::Envelope { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
