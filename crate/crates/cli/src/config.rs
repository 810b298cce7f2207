//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dispersion_core::{CharFn, Perturbation, Window, DEFAULT_RESIDUAL_TOL, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "dispersion", version, about = "Dispersion models from characteristic functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum SubcommandKind {
    Density,
    Verify,
    Riesz,
    Sample,
    Figures,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density curve `y,density` over the window.
    Density(Flags),
    /// Deviance axioms, regularity, normalization residuals and FFT check.
    Verify(Flags),
    /// Gram matrix, frame bounds and orthogonality residuals.
    Riesz(Flags),
    /// Rejection-sampled draws, one per line.
    Sample(Flags),
    /// Curves for the four example models and two reference densities.
    Figures(Flags),
}

impl Command {
    pub fn split(self) -> (SubcommandKind, Flags) {
        match self {
            Command::Density(f) => (SubcommandKind::Density, f),
            Command::Verify(f) => (SubcommandKind::Verify, f),
            Command::Riesz(f) => (SubcommandKind::Riesz, f),
            Command::Sample(f) => (SubcommandKind::Sample, f),
            Command::Figures(f) => (SubcommandKind::Figures, f),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Characteristic function inside `1 - phi`, e.g. `normal:1`, `stable:1.5,1`.
    #[arg(long, value_name = "FAMILY:PARAMS")]
    pub phi: Option<String>,
    /// Characteristic function inside the modulus factor.
    #[arg(long, value_name = "FAMILY:PARAMS")]
    pub psi: Option<String>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// `zero`, `cosgauss:A,OMEGA,S` or `oddgauss:A,S`.
    #[arg(long, value_name = "KIND:PARAMS")]
    pub perturb: Option<String>,
    #[arg(long, value_name = "F")]
    pub tol: Option<f64>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Number of draws for `sample`.
    #[arg(long, value_name = "N")]
    pub count: Option<usize>,
    /// Number of translates for `riesz`.
    #[arg(long, value_name = "N")]
    pub points: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<CharFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<CharFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

/// Everything a run needs; each field optional so file and flags can be
/// layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<SubcommandKind>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_flags(kind: SubcommandKind, flags: &Flags) -> Result<Self, CliError> {
        let window = match flags.window.as_deref() {
            None => None,
            Some([lo, hi]) => Some([*lo, *hi]),
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "--window takes LO HI, got {} value(s)",
                    other.len()
                )))
            }
        };
        Ok(RunConfig {
            subcommand: Some(kind),
            model: ModelSection {
                phi: flags.phi.as_deref().map(str::parse).transpose()?,
                psi: flags.psi.as_deref().map(str::parse).transpose()?,
                lambda: flags.lambda,
                window,
                grid: flags.grid,
                perturbation: flags.perturb.as_deref().map(str::parse).transpose()?,
            },
            mu: flags.mu,
            tol: flags.tol,
            seed: flags.seed,
            count: flags.count,
            points: flags.points,
            out: flags.out.clone(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            subcommand: self.subcommand.or(base.subcommand),
            model: ModelSection {
                phi: self.model.phi.or(base.model.phi),
                psi: self.model.psi.or(base.model.psi),
                lambda: self.model.lambda.or(base.model.lambda),
                window: self.model.window.or(base.model.window),
                grid: self.model.grid.or(base.model.grid),
                perturbation: self.model.perturbation.or(base.model.perturbation),
            },
            mu: self.mu.or(base.mu),
            tol: self.tol.or(base.tol),
            seed: self.seed.or(base.seed),
            count: self.count.or(base.count),
            points: self.points.or(base.points),
            out: self.out.or(base.out),
        }
    }

    pub fn resolve(self) -> Result<Resolved, CliError> {
        let defaults = Window::default();
        let [lo, hi] = self.model.window.unwrap_or([defaults.lo, defaults.hi]);
        let window = Window::new(lo, hi, self.model.grid.unwrap_or(defaults.n_grid))?;
        let phi = self.model.phi.unwrap_or(CharFn::Normal { sigma: 1.0 });
        let psi = self.model.psi.unwrap_or(CharFn::Normal { sigma: 1.0 });
        phi.validate()?;
        psi.validate()?;
        if let Some(p) = &self.model.perturbation {
            p.validate()?;
        }
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be > 0, got {tol}")));
        }
        Ok(Resolved {
            subcommand: self
                .subcommand
                .ok_or_else(|| CliError::Usage("no subcommand".into()))?,
            phi,
            psi,
            lambda: self.model.lambda.unwrap_or(1.0),
            window,
            perturbation: self.model.perturbation,
            mu: self.mu.unwrap_or(0.0),
            tol,
            residual_tol: self.tol.unwrap_or(DEFAULT_RESIDUAL_TOL),
            seed: self.seed.unwrap_or(0),
            count: self.count.unwrap_or(1000),
            points: self.points.unwrap_or(8),
            out: self.out,
        })
    }
}

/// Fully defaulted configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub subcommand: SubcommandKind,
    pub phi: CharFn,
    pub psi: CharFn,
    pub lambda: f64,
    pub window: Window,
    pub perturbation: Option<Perturbation>,
    pub mu: f64,
    pub tol: f64,
    pub residual_tol: f64,
    pub seed: u64,
    pub count: usize,
    pub points: usize,
    pub out: Option<PathBuf>,
}
