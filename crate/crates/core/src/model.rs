//! Assembled dispersion models `p(y; mu, lambda) = a(y) exp(-lambda d(y; mu))`
//! on a truncated window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deviance::RegularityReport;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::normalizer::{Normalizer, NormalizerKind, POSITIVITY_OVERSAMPLE};
use crate::quadrature::integrate;

/// Safety factor applied to the sampled density maximum.
pub const ENVELOPE_FACTOR: f64 = 1.01;

/// Step used by the regularity probe in diagnostics.
pub const REGULARITY_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Proper dispersion model: constant normalizing function.
    #[serde(rename = "PDM")]
    Pdm,
    /// Normalizer varies with `y`; a candidate non-standard model.
    #[serde(rename = "NSDM_candidate")]
    NsdmCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionModel {
    pub kernel: Kernel,
    pub normalizer: Normalizer,
    /// Closed interval of admissible positions, inside the open window.
    pub position_domain: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub mu: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub normalization_residuals: Vec<ResidualPoint>,
    pub classification: Classification,
    /// Deviances of this family never have the additive exponential
    /// dispersion form, so this is always set.
    pub edm_excluded: bool,
    pub regularity: RegularityReport,
    /// Spread (max - min) of the constant-normalizer residual over the
    /// position grid.
    pub truncation_drift: f64,
}

impl DispersionModel {
    /// Model with the position domain set to the middle half of the window.
    pub fn new(kernel: Kernel, normalizer: Normalizer) -> Result<Self> {
        let domain = normalizer.window.middle_half();
        DispersionModel::with_position_domain(kernel, normalizer, domain)
    }

    pub fn with_position_domain(
        kernel: Kernel,
        normalizer: Normalizer,
        position_domain: (f64, f64),
    ) -> Result<Self> {
        kernel.validate()?;
        normalizer.window.validate()?;
        let w = &normalizer.window;
        let (lo, hi) = position_domain;
        if !(lo <= hi && lo > w.lo && hi < w.hi) {
            return Err(Error::invalid(
                "position domain",
                format!(
                    "[{lo}, {hi}] must be a nonempty interval inside ({}, {})",
                    w.lo, w.hi
                ),
            ));
        }
        if !(normalizer.a_tilde.is_finite() && normalizer.a_tilde > 0.0) {
            return Err(Error::invalid(
                "normalizer",
                format!("a_tilde must be > 0, got {}", normalizer.a_tilde),
            ));
        }
        Ok(DispersionModel {
            kernel,
            normalizer,
            position_domain,
        })
    }

    fn require_mu(&self, mu: f64) -> Result<()> {
        let (lo, hi) = self.position_domain;
        if mu >= lo && mu <= hi {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "mu",
                value: mu,
                lo,
                hi,
            })
        }
    }

    #[inline]
    fn density_unchecked(&self, y: f64, mu: f64) -> f64 {
        self.normalizer.value(y) * self.kernel.eval(y - mu)
    }

    pub fn density(&self, y: f64, mu: f64) -> Result<f64> {
        self.normalizer.window.require("y", y)?;
        self.require_mu(mu)?;
        Ok(self.density_unchecked(y, mu))
    }

    /// Density at each of `ys` (all inside the window).
    pub fn density_curve(&self, ys: &[f64], mu: f64) -> Result<Vec<f64>> {
        ys.iter().map(|&y| self.density(y, mu)).collect()
    }

    fn breakpoints(&self, mu: f64) -> Vec<f64> {
        let mut bps = self.normalizer.breakpoints();
        bps.push(mu);
        bps
    }

    /// `int_window p(y; mu) dy - 1`.
    pub fn normalization_check(&self, mu: f64, tol: f64) -> Result<f64> {
        self.require_mu(mu)?;
        let w = &self.normalizer.window;
        integrate(
            |y| self.density_unchecked(y, mu),
            w.lo,
            w.hi,
            &self.breakpoints(mu),
            tol,
        )
        .map(|r| r.value - 1.0)
    }

    pub fn classify(&self) -> Classification {
        if self.normalizer.is_constant() {
            Classification::Pdm
        } else {
            Classification::NsdmCandidate
        }
    }

    /// The same model with the perturbation removed.
    pub fn trivial_part(&self) -> DispersionModel {
        DispersionModel {
            normalizer: Normalizer {
                kind: NormalizerKind::Trivial,
                ..self.normalizer.clone()
            },
            ..self.clone()
        }
    }

    pub fn diagnostics(&self, mu_grid: &[f64], tol: f64) -> Result<DiagnosticsReport> {
        let residuals = mu_grid
            .par_iter()
            .map(|&mu| self.normalization_check(mu, tol))
            .collect::<Result<Vec<_>>>()?;
        let trivial = self.trivial_part();
        let trivial_residuals = mu_grid
            .par_iter()
            .map(|&mu| trivial.normalization_check(mu, tol))
            .collect::<Result<Vec<_>>>()?;
        let (lo, hi) = trivial_residuals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        let center = 0.5 * (self.position_domain.0 + self.position_domain.1);
        Ok(DiagnosticsReport {
            normalization_residuals: mu_grid
                .iter()
                .zip(residuals)
                .map(|(&mu, residual)| ResidualPoint { mu, residual })
                .collect(),
            classification: self.classify(),
            edm_excluded: true,
            regularity: self
                .kernel
                .deviance
                .regularity_probe(center, REGULARITY_STEP)?,
            truncation_drift: if mu_grid.is_empty() { 0.0 } else { hi - lo },
        })
    }

    /// Rejection envelope: the largest density on the oversampled window
    /// grid and at `y = mu`, times [`ENVELOPE_FACTOR`].
    pub fn envelope(&self, mu: f64) -> Result<f64> {
        self.require_mu(mu)?;
        let w = &self.normalizer.window;
        let peak = w
            .oversampled(POSITIVITY_OVERSAMPLE)
            .into_iter()
            .chain(std::iter::once(mu))
            .map(|y| self.density_unchecked(y, mu))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(ENVELOPE_FACTOR * peak)
    }

    /// `n` draws by rejection from a uniform proposal on the window.
    pub fn sample(&self, mu: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.require_mu(mu)?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let envelope = self.envelope(mu)?;
        let w = &self.normalizer.window;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let y = w.lo + w.width() * rng.random::<f64>();
            let density = self.density_unchecked(y, mu);
            if density > envelope {
                return Err(Error::Envelope {
                    y,
                    density,
                    envelope,
                });
            }
            if rng.random::<f64>() * envelope < density {
                out.push(y);
            }
        }
        Ok(out)
    }

    /// Cumulative integrals `int_lo^x p(y; mu) dy` at ascending `xs`.
    pub fn cdf(&self, mu: f64, xs: &[f64], tol: f64) -> Result<Vec<f64>> {
        self.require_mu(mu)?;
        let w = &self.normalizer.window;
        if xs.windows(2).any(|p| p[1] < p[0]) {
            return Err(Error::invalid("cdf abscissae", "must be ascending"));
        }
        for &x in xs {
            w.require("x", x)?;
        }
        let mut edges = Vec::with_capacity(xs.len() + 1);
        edges.push(w.lo);
        edges.extend_from_slice(xs);
        let bps = self.breakpoints(mu);
        // per-piece tolerance keeps the accumulated bound at `tol`
        let piece_tol = tol / xs.len().max(1) as f64;
        let pieces = edges
            .par_windows(2)
            .map(|e| {
                if e[1] > e[0] {
                    integrate(|y| self.density_unchecked(y, mu), e[0], e[1], &bps, piece_tol)
                        .map(|r| r.value)
                } else {
                    Ok(0.0)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut acc = 0.0;
        Ok(pieces
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect())
    }
}
