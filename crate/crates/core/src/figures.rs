//! The four illustrative models (two regularity examples, a constant
//! normalizer and its perturbed counterpart) with normal and Student-t
//! reference curves.

use std::f64::consts::PI;

use crate::charfn::CharFn;
use crate::deviance::UnitDeviance;
use crate::error::Result;
use crate::kernel::{Kernel, Window};
use crate::model::DispersionModel;
use crate::normalizer::{Normalizer, Perturbation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Normal / normal, regular.
    NormalNormal,
    /// Cauchy / normal, corner at the diagonal.
    CauchyNormal,
    /// Laplace / Laplace with the constant normalizer.
    LaplaceLaplace,
    /// Laplace / Laplace with the cosine-Gaussian perturbation.
    LaplacePerturbed,
}

impl Figure {
    pub const ALL: [Figure; 4] = [
        Figure::NormalNormal,
        Figure::CauchyNormal,
        Figure::LaplaceLaplace,
        Figure::LaplacePerturbed,
    ];

    pub fn file_stem(self) -> &'static str {
        match self {
            Figure::NormalNormal => "fig1a_normal_normal",
            Figure::CauchyNormal => "fig1b_cauchy_normal",
            Figure::LaplaceLaplace => "fig2c_laplace_laplace",
            Figure::LaplacePerturbed => "fig2d_laplace_perturbed",
        }
    }

    pub fn deviance(self) -> UnitDeviance {
        let normal = CharFn::Normal { sigma: 1.0 };
        let laplace = CharFn::Laplace { b: 1.0 };
        match self {
            Figure::NormalNormal => UnitDeviance { phi: normal, psi: normal },
            Figure::CauchyNormal => UnitDeviance {
                phi: CharFn::Cauchy { gamma: 1.0 },
                psi: normal,
            },
            Figure::LaplaceLaplace | Figure::LaplacePerturbed => UnitDeviance {
                phi: laplace,
                psi: laplace,
            },
        }
    }

    pub fn model(self, lambda: f64, window: &Window, tol: f64) -> Result<DispersionModel> {
        let kernel = Kernel::new(self.deviance(), lambda)?;
        let mut normalizer = Normalizer::trivial(&kernel, window, tol)?;
        if self == Figure::LaplacePerturbed {
            normalizer = normalizer.perturbed(cosine_gaussian())?;
        }
        DispersionModel::new(kernel, normalizer)
    }
}

/// `(cos 3y + 1) exp(-y^2 / 10)`.
pub fn cosine_gaussian() -> Perturbation {
    Perturbation::CosineGaussian {
        amplitude: 1.0,
        frequency: 3.0,
        width: 5f64.sqrt(),
    }
}

pub fn standard_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Student t density with 3 degrees of freedom.
pub fn student_t3_pdf(x: f64) -> f64 {
    let u = 1.0 + x * x / 3.0;
    2.0 / (PI * 3f64.sqrt() * u * u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: &'static str,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

/// Four model curves followed by the normal and t3 reference curves, all on
/// the `n_grid + 1` mirror-symmetric window points and centered at `mu`.
pub fn figure_curves(lambda: f64, window: &Window, mu: f64, tol: f64) -> Result<Vec<Curve>> {
    window.validate()?;
    let ys = window.oversampled(1);
    let mut curves = Vec::with_capacity(6);
    for fig in Figure::ALL {
        let model = fig.model(lambda, window, tol)?;
        curves.push(Curve {
            name: fig.file_stem(),
            values: model.density_curve(&ys, mu)?,
            ys: ys.clone(),
        });
    }
    curves.push(Curve {
        name: "reference_normal",
        values: ys.iter().map(|&y| standard_normal_pdf(y - mu)).collect(),
        ys: ys.clone(),
    });
    curves.push(Curve {
        name: "reference_t3",
        values: ys.iter().map(|&y| student_t3_pdf(y - mu)).collect(),
        ys,
    });
    Ok(curves)
}
