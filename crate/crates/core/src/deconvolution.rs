//! Discrete Fourier solution of the periodized convolution equation
//! `step * sum_j a_j K(y_i - y_j) = 1` on a window grid.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, Window};

/// Right-hand side coefficients below this fraction of the DC term are
/// treated as round-off.
const RHS_ZERO: f64 = 1e-12;

/// A kernel coefficient below this fraction of the DC term is ill-conditioned
/// wherever the right-hand side is nonzero.
const KERNEL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeconvolutionReport {
    pub grid: Vec<f64>,
    pub solution: Vec<f64>,
    /// Zero-frequency component of the solution.
    pub dc_value: f64,
    /// `max - min` of the solution vector.
    pub non_constancy: f64,
    /// `step * sum K` over one period of lags.
    pub kernel_mass: f64,
    pub step: f64,
}

/// Solves `a * K = 1` on the window grid by FFT.
///
/// `window.n_grid` must be a power of two. The grid is `lo + i * step` with
/// `step = (hi - lo) / n`, and the kernel is sampled at the periodized lags
/// `j * step` for `j < n/2` and `(j - n) * step` otherwise.
pub fn fft_deconvolve(kernel: &Kernel, window: &Window) -> Result<DeconvolutionReport> {
    kernel.validate()?;
    window.validate()?;
    let n = window.n_grid;
    if !n.is_power_of_two() {
        return Err(Error::invalid(
            "window",
            format!("n_grid must be a power of two for the FFT check, got {n}"),
        ));
    }
    let step = window.width() / n as f64;
    let lags: Vec<f64> = (0..n)
        .map(|j| {
            let offset = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            kernel.eval(offset * step)
        })
        .collect();
    let mut report = deconvolve_lags(&lags, step)?;
    report.grid = (0..n).map(|i| window.lo + i as f64 * step).collect();
    Ok(report)
}

/// Core solver on raw periodic kernel samples.
pub fn deconvolve_lags(lags: &[f64], step: f64) -> Result<DeconvolutionReport> {
    let n = lags.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut k_hat: Vec<Complex<f64>> = lags.iter().map(|&v| Complex::new(v, 0.0)).collect();
    forward.process(&mut k_hat);
    let mut rhs = vec![Complex::new(1.0, 0.0); n];
    forward.process(&mut rhs);

    let rhs_dc = rhs[0].norm();
    let k_dc = k_hat[0].norm();
    let mut a_hat = vec![Complex::new(0.0, 0.0); n];
    for i in 0..n {
        if rhs[i].norm() <= RHS_ZERO * rhs_dc {
            continue;
        }
        let magnitude = k_hat[i].norm();
        if !(magnitude > KERNEL_FLOOR * k_dc) {
            return Err(Error::IllConditioned {
                index: i,
                magnitude,
            });
        }
        a_hat[i] = rhs[i] / (k_hat[i] * step);
    }
    let dc_value = a_hat[0].re / n as f64;
    inverse.process(&mut a_hat);
    let solution: Vec<f64> = a_hat.iter().map(|c| c.re / n as f64).collect();
    let (lo, hi) = solution
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(DeconvolutionReport {
        grid: Vec::new(),
        solution,
        dc_value,
        non_constancy: hi - lo,
        kernel_mass: step * lags.iter().sum::<f64>(),
        step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::CharFn;
    use crate::deviance::UnitDeviance;
    use approx::assert_relative_eq;

    fn kernel(phi: CharFn, psi: CharFn, lambda: f64) -> Kernel {
        Kernel::new(UnitDeviance::new(phi, psi).unwrap(), lambda).unwrap()
    }

    #[test]
    fn unit_kernel() {
        let k = kernel(CharFn::Normal { sigma: 1.0 }, CharFn::Normal { sigma: 1.0 }, 0.0);
        let r = fft_deconvolve(&k, &Window::new(-10.0, 10.0, 1024).unwrap()).unwrap();
        assert_relative_eq!(r.dc_value, 0.05, max_relative = 1e-14);
        assert!(r.non_constancy <= 1e-12);
        assert_eq!(r.solution.len(), 1024);
        assert_eq!(r.grid[0], -10.0);
    }

    #[test]
    fn matches_reciprocal_lag_sum() {
        for (phi, psi) in [
            (CharFn::Normal { sigma: 1.0 }, CharFn::Normal { sigma: 1.0 }),
            (CharFn::Laplace { b: 1.0 }, CharFn::Laplace { b: 1.0 }),
            (CharFn::Cauchy { gamma: 1.0 }, CharFn::Normal { sigma: 1.0 }),
        ] {
            let k = kernel(phi, psi, 1.0);
            let r = fft_deconvolve(&k, &Window::default()).unwrap();
            assert_relative_eq!(r.dc_value, 1.0 / r.kernel_mass, max_relative = 1e-12);
            assert!(r.non_constancy <= 1e-10 * r.dc_value);
            // the reported solution solves the periodized equation directly
            let n = r.solution.len();
            for i in [0, n / 3, n - 1] {
                let conv: f64 = (0..n)
                    .map(|j| {
                        let lag = (i + n - j) % n;
                        let off = if lag < n / 2 { lag as f64 } else { lag as f64 - n as f64 };
                        r.solution[j] * k.eval(off * r.step)
                    })
                    .sum::<f64>()
                    * r.step;
                assert_relative_eq!(conv, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn requires_power_of_two() {
        let k = kernel(CharFn::Normal { sigma: 1.0 }, CharFn::Normal { sigma: 1.0 }, 1.0);
        assert!(fft_deconvolve(&k, &Window::new(-20.0, 20.0, 1000).unwrap()).is_err());
    }

    #[test]
    fn zero_mass_kernel_is_ill_conditioned() {
        let lags: Vec<f64> = (0..64).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        match deconvolve_lags(&lags, 0.1) {
            Err(Error::IllConditioned { index, .. }) => assert_eq!(index, 0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
