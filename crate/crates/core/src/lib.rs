//! Dispersion models generated by pairs of real characteristic functions.
//!
//! A pair `(phi, psi)` of characteristic functions of symmetric, non-lattice
//! distributions defines the unit deviance
//! `d(y; mu) = {1 - phi(y - mu)} |psi(y - mu)|`, and with an index parameter
//! `lambda` the kernel `K(y) = exp(-lambda d(y; 0))`. The density
//! `p(y; mu) = a(y) K(y - mu)` is normalized on a finite window either by the
//! constant `1 / int K` or by that constant plus a perturbation.
//!
//! Modules follow the construction order:
//! [`charfn`] -> [`deviance`] -> [`kernel`] / [`normalizer`] ->
//! [`deconvolution`] / [`riesz`] -> [`model`].

pub mod charfn;
pub mod csv;
pub mod deconvolution;
pub mod deviance;
mod error;
pub mod figures;
pub mod kernel;
pub mod model;
pub mod normalizer;
pub mod quadrature;
pub mod riesz;

pub use charfn::CharFn;
pub use deconvolution::{fft_deconvolve, DeconvolutionReport};
pub use deviance::{AxiomReport, Grid, RegularityReport, UnitDeviance};
pub use error::{Error, Result};
pub use kernel::{Kernel, Window, DEFAULT_RESIDUAL_TOL, DEFAULT_TOL};
pub use model::{Classification, DiagnosticsReport, DispersionModel};
pub use normalizer::{Normalizer, NormalizerKind, Perturbation};
pub use riesz::{orthogonality_residual, rational_enumeration, FrameBounds, GramReport, TranslateSystem};
