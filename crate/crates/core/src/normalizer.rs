//! Normalizing functions: the constant solution `a = 1 / int K` and its
//! perturbations `g = a + f`, together with the residual of the
//! convolution equation `(g * K)(mu) = 1`.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, Window};
use crate::quadrature::integrate;

/// Oversampling factor for positivity checks.
pub const POSITIVITY_OVERSAMPLE: usize = 4;

/// Additive perturbation `f` of the constant normalizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Perturbation {
    Zero,
    /// `A (cos(omega y) + 1) exp(-y^2 / (2 s^2))`
    CosineGaussian {
        amplitude: f64,
        frequency: f64,
        width: f64,
    },
    /// `A (y / s) exp(-y^2 / (2 s^2))`; odd, so outside the symmetric class.
    OddGaussian { amplitude: f64, width: f64 },
    /// Even function tabulated on `0 <= knots[0] < knots[1] < ...`,
    /// linearly interpolated in `|y|` and zero beyond the last knot.
    Custom { knots: Vec<f64>, values: Vec<f64> },
}

impl Perturbation {
    pub fn validate(&self) -> Result<()> {
        let bad = |r: String| Err(Error::invalid("perturbation", r));
        match self {
            Perturbation::Zero => Ok(()),
            Perturbation::CosineGaussian {
                amplitude,
                frequency,
                width,
            } => {
                if !(amplitude.is_finite() && frequency.is_finite()) {
                    return bad("amplitude and frequency must be finite".into());
                }
                if !(width.is_finite() && *width > 0.0) {
                    return bad(format!("width must be > 0, got {width}"));
                }
                Ok(())
            }
            Perturbation::OddGaussian { amplitude, width } => {
                if !amplitude.is_finite() {
                    return bad("amplitude must be finite".into());
                }
                if !(width.is_finite() && *width > 0.0) {
                    return bad(format!("width must be > 0, got {width}"));
                }
                Ok(())
            }
            Perturbation::Custom { knots, values } => {
                if knots.len() < 2 || knots.len() != values.len() {
                    return bad(format!(
                        "need >= 2 knots with matching values, got {} knots and {} values",
                        knots.len(),
                        values.len()
                    ));
                }
                if knots[0] < 0.0 || knots.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("knots must be >= 0 and strictly increasing".into());
                }
                if knots.iter().chain(values).any(|v| !v.is_finite()) {
                    return bad("knots and values must be finite".into());
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Perturbation::Zero => 0.0,
            Perturbation::CosineGaussian {
                amplitude,
                frequency,
                width,
            } => amplitude * ((frequency * y).cos() + 1.0) * (-y * y / (2.0 * width * width)).exp(),
            Perturbation::OddGaussian { amplitude, width } => {
                amplitude * (y / width) * (-y * y / (2.0 * width * width)).exp()
            }
            Perturbation::Custom { knots, values } => {
                let x = y.abs();
                let last = knots.len() - 1;
                if x < knots[0] {
                    return values[0];
                }
                if x > knots[last] {
                    return 0.0;
                }
                let i = knots.partition_point(|&k| k <= x).clamp(1, last);
                let (x0, x1) = (knots[i - 1], knots[i]);
                let (v0, v1) = (values[i - 1], values[i]);
                v0 + (v1 - v0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Membership in the class of even perturbations.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Perturbation::OddGaussian { .. })
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            Perturbation::Zero => true,
            Perturbation::CosineGaussian { amplitude, .. }
            | Perturbation::OddGaussian { amplitude, .. } => *amplitude == 0.0,
            Perturbation::Custom { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// Points where `f` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Perturbation::Custom { knots, .. } => knots
                .iter()
                .flat_map(|&k| [k, -k])
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// Parses `zero`, `cosgauss:A,OMEGA,S` or `oddgauss:A,S`.
impl FromStr for Perturbation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |r: String| Error::invalid("perturbation", r);
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let values = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("`{p}` is not a number in `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        let arity = |n: usize| {
            if values.len() == n {
                Ok(())
            } else {
                Err(bad(format!("`{name}` takes {n} parameter(s), got {}", values.len())))
            }
        };
        let p = match name.trim().to_ascii_lowercase().as_str() {
            "zero" => {
                arity(0)?;
                Perturbation::Zero
            }
            "cosgauss" => {
                arity(3)?;
                Perturbation::CosineGaussian {
                    amplitude: values[0],
                    frequency: values[1],
                    width: values[2],
                }
            }
            "oddgauss" => {
                arity(2)?;
                Perturbation::OddGaussian {
                    amplitude: values[0],
                    width: values[1],
                }
            }
            other => return Err(bad(format!("unknown perturbation `{other}`"))),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "perturbation", rename_all = "snake_case")]
pub enum NormalizerKind {
    Trivial,
    Perturbed(Perturbation),
}

/// A normalizing function on a window: `a_tilde`, or `a_tilde + f(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub kind: NormalizerKind,
    pub a_tilde: f64,
    pub window: Window,
}

impl Normalizer {
    /// `a_tilde = 1 / int_window K`.
    pub fn trivial(kernel: &Kernel, window: &Window, tol: f64) -> Result<Self> {
        kernel.validate()?;
        window.validate()?;
        let integral = kernel.integral(window, tol)?;
        Ok(Normalizer {
            kind: NormalizerKind::Trivial,
            a_tilde: 1.0 / integral.value,
            window: *window,
        })
    }

    /// Adds `f` to a trivial normalizer, rejecting it if `a_tilde + f` is not
    /// strictly positive on the oversampled window grid.
    pub fn perturbed(&self, f: Perturbation) -> Result<Self> {
        if self.kind != NormalizerKind::Trivial {
            return Err(Error::invalid(
                "normalizer",
                "only a trivial normalizer can be perturbed",
            ));
        }
        f.validate()?;
        for y in self.window.oversampled(POSITIVITY_OVERSAMPLE) {
            let value = self.a_tilde + f.eval(y);
            if !(value > 0.0) {
                return Err(Error::Positivity { y, value });
            }
        }
        Ok(Normalizer {
            kind: NormalizerKind::Perturbed(f),
            ..self.clone()
        })
    }

    pub fn perturbation(&self) -> Option<&Perturbation> {
        match &self.kind {
            NormalizerKind::Trivial => None,
            NormalizerKind::Perturbed(f) => Some(f),
        }
    }

    #[inline]
    pub fn value(&self, y: f64) -> f64 {
        match &self.kind {
            NormalizerKind::Trivial => self.a_tilde,
            NormalizerKind::Perturbed(f) => self.a_tilde + f.eval(y),
        }
    }

    /// Constant in `y`.
    pub fn is_constant(&self) -> bool {
        self.perturbation().is_none_or(Perturbation::is_identically_zero)
    }

    /// Largest value on the oversampled window grid.
    pub fn max_on_grid(&self) -> f64 {
        match &self.kind {
            NormalizerKind::Trivial => self.a_tilde,
            NormalizerKind::Perturbed(_) => self
                .window
                .oversampled(POSITIVITY_OVERSAMPLE)
                .into_iter()
                .map(|y| self.value(y))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        self.perturbation().map(|f| f.breakpoints()).unwrap_or_default()
    }

    /// `int_window g(y) K(mu - y) dy - 1` for each `mu`.
    pub fn convolution_residual(&self, kernel: &Kernel, mu_grid: &[f64], tol: f64) -> Result<Vec<f64>> {
        for &mu in mu_grid {
            self.window.require("mu", mu)?;
        }
        let extra = self.breakpoints();
        mu_grid
            .par_iter()
            .map(|&mu| {
                let mut bps = extra.clone();
                bps.push(mu);
                let w = &self.window;
                integrate(|y| self.value(y) * kernel.eval(mu - y), w.lo, w.hi, &bps, tol)
                    .map(|r| r.value - 1.0)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::CharFn;
    use crate::deviance::UnitDeviance;
    use approx::assert_relative_eq;

    const NORMAL: CharFn = CharFn::Normal { sigma: 1.0 };
    const LAPLACE: CharFn = CharFn::Laplace { b: 1.0 };

    fn kernel(phi: CharFn, psi: CharFn, lambda: f64) -> Kernel {
        Kernel::new(UnitDeviance::new(phi, psi).unwrap(), lambda).unwrap()
    }

    fn fig_perturbation(amplitude: f64) -> Perturbation {
        Perturbation::CosineGaussian {
            amplitude,
            frequency: 3.0,
            width: 5f64.sqrt(),
        }
    }

    #[test]
    fn degenerate_trivial() {
        let w = Window::new(-10.0, 10.0, 1024).unwrap();
        let n = Normalizer::trivial(&kernel(NORMAL, NORMAL, 0.0), &w, 1e-10).unwrap();
        assert_relative_eq!(n.a_tilde, 0.05, max_relative = 1e-15);
        assert!(n.is_constant());
    }

    #[test]
    fn golden_trivial() {
        let w = Window::default();
        let n = Normalizer::trivial(&kernel(NORMAL, NORMAL, 1.0), &w, 1e-10).unwrap();
        assert_relative_eq!(n.a_tilde, 0.025_427_660_199_024_956, max_relative = 1e-12);
    }

    #[test]
    fn shifted_window_same_constant() {
        let k = kernel(LAPLACE, LAPLACE, 1.0);
        let w = Window::default();
        let base = k.integral(&w, 1e-10).unwrap().value;
        for c in [-3.3, 0.7, 12.0] {
            let shifted = k.integral_centered(&w.shifted(c), c, 1e-10).unwrap().value;
            assert_relative_eq!(1.0 / shifted, 1.0 / base, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let w = Window::default();
        let k = kernel(NORMAL, NORMAL, 1.0);
        let base = Normalizer::trivial(&k, &w, 1e-10).unwrap();
        let p = base.perturbed(Perturbation::Zero).unwrap();
        for y in [-20.0, -1.0, 0.0, 3.5, 20.0] {
            assert_eq!(p.value(y), base.value(y));
        }
        assert!(p.is_constant());
        let mus = [-5.0, 0.0, 4.0];
        assert_eq!(
            p.convolution_residual(&k, &mus, 1e-8).unwrap(),
            base.convolution_residual(&k, &mus, 1e-8).unwrap()
        );
    }

    #[test]
    fn cosine_gaussian_accepted_and_negative_rejected() {
        let w = Window::default();
        let base = Normalizer::trivial(&kernel(LAPLACE, LAPLACE, 1.0), &w, 1e-10).unwrap();
        let p = base.perturbed(fig_perturbation(1.0)).unwrap();
        assert_relative_eq!(p.value(0.0), base.a_tilde + 2.0, max_relative = 1e-15);
        assert!(!p.is_constant());

        let err = base.perturbed(fig_perturbation(-2.0 * base.a_tilde)).unwrap_err();
        match err {
            Error::Positivity { value, .. } => assert!(value <= 0.0),
            other => panic!("unexpected {other:?}"),
        }
        // already perturbed
        assert!(p.perturbed(Perturbation::Zero).is_err());
    }

    #[test]
    fn perturbation_shapes() {
        let f = fig_perturbation(1.0);
        // (cos 3y + 1) exp(-y^2 / 10)
        for y in [0.0f64, 0.4, 1.7, -2.2, 6.0] {
            let expect = ((3.0 * y).cos() + 1.0) * (-(y * y) / 10.0).exp();
            assert_relative_eq!(f.eval(y), expect, max_relative = 1e-14);
            assert_eq!(f.eval(y), f.eval(-y));
        }
        let odd = Perturbation::OddGaussian {
            amplitude: 1.0,
            width: 2.0,
        };
        assert!(!odd.is_symmetric());
        assert_eq!(odd.eval(1.3), -odd.eval(-1.3));
        let custom = Perturbation::Custom {
            knots: vec![0.0, 1.0, 2.0],
            values: vec![1.0, 0.5, 0.0],
        };
        custom.validate().unwrap();
        assert_eq!(custom.eval(-0.5), 0.75);
        assert_eq!(custom.eval(1.5), 0.25);
        assert_eq!(custom.eval(9.0), 0.0);
        assert!(custom.is_symmetric());
        assert!(Perturbation::Custom {
            knots: vec![1.0, 0.5],
            values: vec![0.0, 0.0]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn perturbation_parsing() {
        assert_eq!("zero".parse::<Perturbation>().unwrap(), Perturbation::Zero);
        assert_eq!(
            "cosgauss:1,3,2".parse::<Perturbation>().unwrap(),
            Perturbation::CosineGaussian {
                amplitude: 1.0,
                frequency: 3.0,
                width: 2.0
            }
        );
        assert!("cosgauss:1,3,0".parse::<Perturbation>().is_err());
        assert!("oddgauss:1".parse::<Perturbation>().is_err());
        assert!("sinc:1".parse::<Perturbation>().is_err());
    }

    #[test]
    fn residual_at_center_vanishes() {
        let w = Window::default();
        let k = kernel(NORMAL, NORMAL, 1.0);
        let n = Normalizer::trivial(&k, &w, 1e-10).unwrap();
        let r = n.convolution_residual(&k, &[0.0], 1e-10).unwrap();
        assert!(r[0].abs() <= 1e-9, "{}", r[0]);
    }

    #[test]
    fn residual_drifts_near_boundary() {
        let w = Window::default();
        let k = kernel(NORMAL, NORMAL, 1.0);
        let n = Normalizer::trivial(&k, &w, 1e-10).unwrap();
        let r = n.convolution_residual(&k, &[18.0], 1e-10).unwrap();
        // 30-digit reference
        assert_relative_eq!(r[0], 0.001_302_361_810_083_643_3, max_relative = 1e-6);
    }

    #[test]
    fn residual_rejects_outside_mu() {
        let w = Window::default();
        let k = kernel(NORMAL, NORMAL, 1.0);
        let n = Normalizer::trivial(&k, &w, 1e-10).unwrap();
        assert!(matches!(
            n.convolution_residual(&k, &[25.0], 1e-8),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn perturbed_residuals_match_reference() {
        // 30-digit references for trivial residual + orthogonality defect
        let reference = [
            (-5.0, 0.000_170_257_358_553_382_11 + 5.297_161_673_093_359_6),
            (-2.0, 0.000_025_824_671_527_247_842 + 5.050_817_703_733_835_3),
            (0.0, 5.004_505_485_671_569_8),
            (1.0, 0.000_006_408_536_890_544_084 + 4.777_776_653_672_304_6),
            (4.0, 0.000_106_462_741_955_098_46 + 5.209_696_702_746_975_3),
        ];
        let w = Window::default();
        let k = kernel(LAPLACE, LAPLACE, 1.0);
        let n = Normalizer::trivial(&k, &w, 1e-12)
            .unwrap()
            .perturbed(fig_perturbation(1.0))
            .unwrap();
        let mus: Vec<f64> = reference.iter().map(|r| r.0).collect();
        let got = n.convolution_residual(&k, &mus, 1e-10).unwrap();
        for (g, (_, want)) in got.iter().zip(reference) {
            assert!((g - want).abs() <= 1e-8, "{g} vs {want}");
        }
    }
}
