//! Command-line front end: `density`, `verify`, `riesz`, `sample` and
//! `figures`.
//!
//! Exit codes: 0 on success, 1 for invalid input (flags, config, model
//! parameters, I/O), 2 for numerical failures (quadrature, FFT conditioning,
//! rejection envelope). Nothing is written unless the whole run succeeds.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use dispersion_core::csv::CsvTable;
use dispersion_core::deviance::symmetric_points;
use dispersion_core::figures::{cosine_gaussian, figure_curves};
use dispersion_core::riesz::GRAM_TOL;
use dispersion_core::{
    fft_deconvolve, orthogonality_residual, AxiomReport, DeconvolutionReport, DiagnosticsReport,
    DispersionModel, FrameBounds, GramReport, Grid, Kernel, Normalizer, Perturbation,
    TranslateSystem, UnitDeviance,
};
use serde::Serialize;
use thiserror::Error;

use crate::config::{Cli, Resolved, RunConfig, SubcommandKind};

/// Points per axis of the deviance axiom grid.
const AXIOM_GRID: usize = 101;

/// Positions in residual curves.
const MU_GRID: usize = 21;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dispersion_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

/// Parses `argv` (program name first) and runs, writing diagnostics to
/// `stderr` and tabular output to `stdout` when no `--out` is given.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match execute(cli).and_then(|out| out.write(stdout)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<Output, CliError> {
    let (kind, flags) = cli.command.split();
    let from_flags = RunConfig::from_flags(kind, &flags)?;
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    // the subcommand on the command line is authoritative
    let resolved = from_flags.over(file).resolve()?;
    match resolved.subcommand {
        SubcommandKind::Density => density(&resolved),
        SubcommandKind::Verify => verify(&resolved),
        SubcommandKind::Riesz => riesz(&resolved),
        SubcommandKind::Sample => sample(&resolved),
        SubcommandKind::Figures => figures(&resolved),
    }
}

enum Output {
    /// Single document: written to `path` if given, else to stdout.
    Document(Option<PathBuf>, String),
    /// Named files under a directory, or one JSON document on stdout.
    Directory {
        dir: Option<PathBuf>,
        files: Vec<(String, String)>,
        stdout_fallback: String,
    },
}

impl Output {
    fn write(self, stdout: &mut dyn Write) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        match self {
            Output::Document(None, text)
            | Output::Directory {
                dir: None,
                stdout_fallback: text,
                ..
            } => stdout
                .write_all(text.as_bytes())
                .map_err(io(Path::new("<stdout>"))),
            Output::Document(Some(path), text) => {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent).map_err(io(parent))?;
                }
                std::fs::write(&path, text).map_err(io(&path))
            }
            Output::Directory {
                dir: Some(dir),
                files,
                ..
            } => {
                std::fs::create_dir_all(&dir).map_err(io(&dir))?;
                for (name, text) in files {
                    let path = dir.join(name);
                    std::fs::write(&path, text).map_err(io(&path))?;
                }
                Ok(())
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports are plain data");
    s.push('\n');
    s
}

fn kernel(r: &Resolved) -> Result<Kernel, CliError> {
    Ok(Kernel::new(UnitDeviance::new(r.phi, r.psi)?, r.lambda)?)
}

fn build_model(r: &Resolved) -> Result<DispersionModel, CliError> {
    let k = kernel(r)?;
    let mut normalizer = Normalizer::trivial(&k, &r.window, r.tol)?;
    if let Some(f) = &r.perturbation {
        normalizer = normalizer.perturbed(f.clone())?;
    }
    Ok(DispersionModel::new(k, normalizer)?)
}

fn position_grid(model: &DispersionModel) -> Vec<f64> {
    let (lo, hi) = model.position_domain;
    symmetric_points(lo, hi, MU_GRID)
}

fn density(r: &Resolved) -> Result<Output, CliError> {
    let model = build_model(r)?;
    let ys = r.window.oversampled(1);
    let values = model.density_curve(&ys, r.mu)?;
    let table = CsvTable::from_columns(["y", "density"], &ys, &values);
    Ok(Output::Document(r.out.clone(), table.into_string()))
}

#[derive(Serialize)]
struct DeconvolutionSummary {
    dc_value: f64,
    non_constancy: f64,
    kernel_mass: f64,
    step: f64,
    trivial_a_tilde: f64,
    relative_gap: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    model: DispersionModel,
    axioms: AxiomReport,
    diagnostics: DiagnosticsReport,
    deconvolution: Option<DeconvolutionSummary>,
}

fn verify(r: &Resolved) -> Result<Output, CliError> {
    let model = build_model(r)?;
    let (lo, hi) = model.position_domain;
    let axioms = model
        .kernel
        .deviance
        .check_axioms(&Grid::uniform(lo, hi, AXIOM_GRID)?)?;
    let mus = position_grid(&model);
    let diagnostics = model.diagnostics(&mus, r.residual_tol)?;
    let residuals = model
        .normalizer
        .convolution_residual(&model.kernel, &mus, r.residual_tol)?;

    let mut files = Vec::new();
    files.push((
        "residuals.csv".to_string(),
        CsvTable::from_columns(["mu", "residual"], &mus, &residuals).into_string(),
    ));
    let deconvolution = if r.window.n_grid.is_power_of_two() {
        let DeconvolutionReport {
            grid,
            solution,
            dc_value,
            non_constancy,
            kernel_mass,
            step,
        } = fft_deconvolve(&model.kernel, &r.window)?;
        let mut table = CsvTable::new(&["index", "y", "value"]);
        for (i, (y, v)) in grid.iter().zip(&solution).enumerate() {
            table.push_indexed(i, &[*y, *v]);
        }
        files.push(("deconvolution.csv".to_string(), table.into_string()));
        let a = model.normalizer.a_tilde;
        Some(DeconvolutionSummary {
            dc_value,
            non_constancy,
            kernel_mass,
            step,
            trivial_a_tilde: a,
            relative_gap: (dc_value - a).abs() / a,
        })
    } else {
        None
    };
    let report = to_json(&VerifyReport {
        model,
        axioms,
        diagnostics,
        deconvolution,
    });
    files.insert(0, ("report.json".to_string(), report.clone()));
    Ok(Output::Directory {
        dir: r.out.clone(),
        files,
        stdout_fallback: report,
    })
}

#[derive(Serialize)]
struct TrajectoryPoint {
    n: usize,
    bounds: FrameBounds,
}

#[derive(Serialize)]
struct RieszReport {
    gram: GramReport,
    frame_bounds: FrameBounds,
    trajectory: Vec<TrajectoryPoint>,
    perturbation: Perturbation,
    orthogonality: Vec<(f64, f64)>,
}

fn riesz(r: &Resolved) -> Result<Output, CliError> {
    let model = build_model(r)?;
    let system = TranslateSystem::rational(model.kernel, r.points, r.window)?;
    let gram = system.gram_matrix(GRAM_TOL.min(r.tol))?;
    let mut sizes: Vec<usize> = std::iter::successors(Some(1usize), |n| Some(n * 2))
        .take_while(|&n| n < r.points)
        .collect();
    sizes.push(r.points);
    let trajectory = sizes
        .into_iter()
        .map(|n| {
            Ok(TrajectoryPoint {
                n,
                bounds: gram.leading(n)?.frame_bounds(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let f = r.perturbation.clone().unwrap_or_else(cosine_gaussian);
    let mus = position_grid(&model);
    let rho = orthogonality_residual(&f, &model.kernel, &r.window, &mus, r.residual_tol)?;
    let csv = CsvTable::from_columns(["mu", "residual"], &mus, &rho).into_string();
    let report = to_json(&RieszReport {
        frame_bounds: gram.frame_bounds(),
        gram,
        trajectory,
        perturbation: f,
        orthogonality: mus.iter().copied().zip(rho).collect(),
    });
    Ok(Output::Directory {
        dir: r.out.clone(),
        files: vec![
            ("riesz.json".to_string(), report.clone()),
            ("orthogonality.csv".to_string(), csv),
        ],
        stdout_fallback: report,
    })
}

fn sample(r: &Resolved) -> Result<Output, CliError> {
    let model = build_model(r)?;
    let draws = model.sample(r.mu, r.count, r.seed)?;
    let mut table = CsvTable::new(&["value"]);
    for y in draws {
        table.push(&[y]);
    }
    Ok(Output::Document(r.out.clone(), table.into_string()))
}

fn figures(r: &Resolved) -> Result<Output, CliError> {
    let dir = r
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("figures needs --out DIR".into()))?;
    let curves = figure_curves(r.lambda, &r.window, r.mu, r.tol)?;
    let files = curves
        .into_iter()
        .map(|c| {
            (
                format!("{}.csv", c.name),
                CsvTable::from_columns(["y", "density"], &c.ys, &c.values).into_string(),
            )
        })
        .collect();
    Ok(Output::Directory {
        dir: Some(dir),
        files,
        stdout_fallback: String::new(),
    })
}
