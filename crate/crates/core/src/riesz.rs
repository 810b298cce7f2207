//! Finite translate systems `K(. - q_n)` over an enumeration of the
//! rationals: Gram matrices, their exact frame bounds, and the inner products
//! of symmetric perturbations against kernel translates.
//!
//! Inner products between translates are taken on the window treated as a
//! circle of circumference `hi - lo`, i.e. each translate is wrapped back
//! into the window. That keeps `||K(. - q)||` independent of `q` on a finite
//! support, which a plain truncated integral does not.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, Window};
use crate::normalizer::Perturbation;
use crate::quadrature::integrate;

/// Default absolute tolerance for Gram entries.
pub const GRAM_TOL: f64 = 1e-12;

/// `0` followed by the Calkin-Wilf sequence with each term and its negation:
/// `0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 3/2, -3/2, ...`
pub fn rational_enumeration(n: usize) -> Vec<f64> {
    rational_enumeration_exact(n)
        .into_iter()
        .map(|(p, q)| p as f64 / q as f64)
        .collect()
}

/// Same as [`rational_enumeration`] as `(numerator, denominator)` pairs.
pub fn rational_enumeration_exact(n: usize) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push((0, 1));
    // Calkin-Wilf successor of a/b is b / (2 floor(a/b) b - a + b)
    let (mut a, mut b) = (1i64, 1i64);
    while out.len() < n {
        out.push((a, b));
        if out.len() < n {
            out.push((-a, b));
        }
        let next_den = 2 * (a / b) * b - a + b;
        (a, b) = (b, next_den);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateSystem {
    pub kernel: Kernel,
    pub points: Vec<f64>,
    pub window: Window,
}

impl TranslateSystem {
    pub fn new(kernel: Kernel, points: Vec<f64>, window: Window) -> Result<Self> {
        let s = TranslateSystem {
            kernel,
            points,
            window,
        };
        s.validate()?;
        Ok(s)
    }

    /// The first `n` points of [`rational_enumeration`].
    pub fn rational(kernel: Kernel, n: usize, window: Window) -> Result<Self> {
        TranslateSystem::new(kernel, rational_enumeration(n), window)
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        self.window.validate()?;
        if self.points.is_empty() {
            return Err(Error::invalid("translate system", "no points"));
        }
        let (lo, hi) = self.window.middle_half();
        for (i, &p) in self.points.iter().enumerate() {
            if !(p >= lo && p <= hi) {
                return Err(Error::Domain {
                    name: "translation point",
                    value: p,
                    lo,
                    hi,
                });
            }
            if self.points[..i].contains(&p) {
                return Err(Error::invalid(
                    "translate system",
                    format!("duplicate point {p}"),
                ));
            }
        }
        Ok(())
    }

    fn wrap(&self, t: f64) -> f64 {
        let period = self.window.width();
        let half = 0.5 * period;
        (t + half).rem_euclid(period) - half
    }

    /// `K(y - q)` wrapped onto the window.
    pub fn translate(&self, q: f64, y: f64) -> f64 {
        self.kernel.eval(self.wrap(y - q))
    }

    fn inner(&self, p: f64, q: f64, tol: f64) -> Result<f64> {
        let w = &self.window;
        let half = 0.5 * w.width();
        let bps: Vec<f64> = [p, q]
            .iter()
            .flat_map(|&c| [c, c - half, c + half])
            .collect();
        integrate(
            |y| self.translate(p, y) * self.translate(q, y),
            w.lo,
            w.hi,
            &bps,
            tol,
        )
        .map(|r| r.value)
    }

    /// `||K||^2` over one period.
    pub fn kernel_norm_sq(&self, tol: f64) -> Result<f64> {
        let half = 0.5 * self.window.width();
        integrate(|t| self.kernel.eval(t).powi(2), -half, half, &[0.0], tol).map(|r| r.value)
    }

    pub fn gram_matrix(&self, tol: f64) -> Result<GramReport> {
        let n = self.points.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let values = pairs
            .par_iter()
            .map(|&(i, j)| self.inner(self.points[i], self.points[j], tol))
            .collect::<Result<Vec<f64>>>()?;
        let mut gram = vec![vec![0.0; n]; n];
        for (&(i, j), v) in pairs.iter().zip(values) {
            gram[i][j] = v;
            gram[j][i] = v;
        }
        GramReport::from_gram(self.points.clone(), gram, self.kernel_norm_sq(tol)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub points: Vec<f64>,
    pub gram: Vec<Vec<f64>>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub k_norm_sq: f64,
    /// Largest off-diagonal magnitude; zero only for an orthogonal system.
    pub tight_claim_gap: f64,
}

impl GramReport {
    pub fn from_gram(points: Vec<f64>, gram: Vec<Vec<f64>>, k_norm_sq: f64) -> Result<Self> {
        let eigenvalues = symmetric_eigenvalues(&gram)?;
        let n = gram.len();
        let tight_claim_gap = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| gram[i][j].abs())
            .fold(0.0, f64::max);
        Ok(GramReport {
            points,
            min_eigenvalue: eigenvalues[0],
            max_eigenvalue: eigenvalues[n - 1],
            eigenvalues,
            gram,
            k_norm_sq,
            tight_claim_gap,
        })
    }

    /// Report for the first `m` translates (leading principal submatrix).
    pub fn leading(&self, m: usize) -> Result<GramReport> {
        if m == 0 || m > self.points.len() {
            return Err(Error::invalid(
                "gram report",
                format!("leading size {m} outside 1..={}", self.points.len()),
            ));
        }
        let gram = self.gram[..m].iter().map(|row| row[..m].to_vec()).collect();
        GramReport::from_gram(self.points[..m].to_vec(), gram, self.k_norm_sq)
    }

    pub fn frame_bounds(&self) -> FrameBounds {
        FrameBounds {
            lower: self.min_eigenvalue,
            upper: self.max_eigenvalue,
            lower_ratio: self.min_eigenvalue / self.k_norm_sq,
            upper_ratio: self.max_eigenvalue / self.k_norm_sq,
        }
    }
}

/// Exact Riesz constants of a finite system, with their ratio to `||K||^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_ratio: f64,
    pub upper_ratio: f64,
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("matrix", "must be square and nonempty"));
    }
    let dm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let mut ev: Vec<f64> = SymmetricEigen::new(dm).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `rho(mu) = int_window f(y) K(mu - y) dy` for each `mu`.
pub fn orthogonality_residual(
    f: &Perturbation,
    kernel: &Kernel,
    window: &Window,
    mu_grid: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    f.validate()?;
    kernel.validate()?;
    for &mu in mu_grid {
        window.require("mu", mu)?;
    }
    if f.is_identically_zero() {
        return Ok(vec![0.0; mu_grid.len()]);
    }
    let extra = f.breakpoints();
    mu_grid
        .par_iter()
        .map(|&mu| {
            let mut bps = extra.clone();
            bps.push(mu);
            integrate(
                |y| f.eval(y) * kernel.eval(mu - y),
                window.lo,
                window.hi,
                &bps,
                tol,
            )
            .map(|r| r.value)
        })
        .collect()
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

    fn laplace() -> Kernel {
        kernel(CharFn::Laplace { b: 1.0 }, CharFn::Laplace { b: 1.0 }, 1.0)
    }

    #[test]
    fn enumeration_prefixes() {
        assert_eq!(rational_enumeration(1), vec![0.0]);
        assert_eq!(rational_enumeration(3), vec![0.0, 1.0, -1.0]);
        assert_eq!(
            rational_enumeration(7),
            vec![0.0, 1.0, -1.0, 0.5, -0.5, 2.0, -2.0]
        );
        assert!(rational_enumeration(0).is_empty());
        let exact = rational_enumeration_exact(15);
        assert_eq!(&exact[7..11], &[(1, 3), (-1, 3), (3, 2), (-3, 2)]);
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        let e = rational_enumeration_exact(2001);
        let mut seen = std::collections::HashSet::new();
        for &(p, q) in &e {
            let g = gcd(p.abs(), q);
            assert_eq!(g, 1, "{p}/{q} not reduced");
            assert!(seen.insert((p, q)));
        }
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn single_translate() {
        let s = TranslateSystem::rational(laplace(), 1, Window::default()).unwrap();
        let g = s.gram_matrix(GRAM_TOL).unwrap();
        assert_relative_eq!(g.gram[0][0], g.k_norm_sq, max_relative = 1e-12);
        assert_eq!(g.min_eigenvalue, g.max_eigenvalue);
        assert_eq!(g.tight_claim_gap, 0.0);
        let fb = g.frame_bounds();
        assert_relative_eq!(fb.lower, g.k_norm_sq, max_relative = 1e-12);
        assert_relative_eq!(fb.upper_ratio, 1.0, max_relative = 1e-12);
        // 30-digit reference for ||K||^2 on [-20, 20]
        assert_relative_eq!(g.k_norm_sq, 37.406_218_289_536_642, max_relative = 1e-12);
    }

    #[test]
    fn overlapping_pair() {
        let k = kernel(CharFn::Normal { sigma: 1.0 }, CharFn::Normal { sigma: 1.0 }, 1.0);
        let s = TranslateSystem::new(k, vec![0.0, 1.0], Window::default()).unwrap();
        let g = s.gram_matrix(GRAM_TOL).unwrap();
        assert!(g.gram[0][1] > 0.0);
        assert_relative_eq!(g.gram[0][1], 38.711_595_418_518_154, max_relative = 1e-11);
        assert_relative_eq!(g.k_norm_sq, 38.762_044_064_401_248, max_relative = 1e-11);
        assert!(g.tight_claim_gap > 0.0);
        let fb = g.frame_bounds();
        assert!(fb.lower < g.k_norm_sq && g.k_norm_sq < fb.upper);
    }

    #[test]
    fn system_validation() {
        let w = Window::default();
        assert!(TranslateSystem::new(laplace(), vec![], w).is_err());
        assert!(TranslateSystem::new(laplace(), vec![1.0, 1.0], w).is_err());
        assert!(TranslateSystem::new(laplace(), vec![0.0, 15.0], w).is_err());
    }

    #[test]
    fn wrap_is_periodic() {
        let s = TranslateSystem::rational(laplace(), 1, Window::default()).unwrap();
        assert_eq!(s.wrap(0.0), 0.0);
        assert_eq!(s.wrap(25.0), -15.0);
        assert_eq!(s.wrap(-25.0), 15.0);
        assert_eq!(s.wrap(-20.0), -20.0);
    }

    #[test]
    fn leading_submatrix() {
        let s = TranslateSystem::rational(laplace(), 4, Window::default()).unwrap();
        let g = s.gram_matrix(GRAM_TOL).unwrap();
        let g2 = g.leading(2).unwrap();
        assert_eq!(g2.gram, vec![g.gram[0][..2].to_vec(), g.gram[1][..2].to_vec()]);
        assert!(g.leading(0).is_err());
        assert!(g.leading(5).is_err());
    }

    #[test]
    fn eigenvalues_of_known_matrix() {
        let ev = symmetric_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert_relative_eq!(ev[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(ev[1], 3.0, max_relative = 1e-14);
        assert!(symmetric_eigenvalues(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn zero_and_odd_perturbations() {
        let w = Window::default();
        let mus = [-3.0, 0.0, 2.0];
        let zero = orthogonality_residual(&Perturbation::Zero, &laplace(), &w, &mus, 1e-10).unwrap();
        assert_eq!(zero, vec![0.0; 3]);
        let odd = Perturbation::OddGaussian {
            amplitude: 1.0,
            width: 2.0,
        };
        let r = orthogonality_residual(&odd, &laplace(), &w, &[0.0], 1e-10).unwrap();
        assert!(r[0].abs() <= 1e-9, "{}", r[0]);
    }

    #[test]
    fn symmetric_nonnegative_perturbation_is_not_orthogonal() {
        let f = Perturbation::CosineGaussian {
            amplitude: 1.0,
            frequency: 3.0,
            width: 5f64.sqrt(),
        };
        let mus: Vec<f64> = (-5..=5).map(f64::from).collect();
        let r = orthogonality_residual(&f, &laplace(), &Window::default(), &mus, 1e-10).unwrap();
        assert!(r.iter().all(|&v| v > 0.0));
        // 30-digit reference at mu = 0 and mu = +-3
        assert!((r[5] - 5.004_505_485_671_569_8).abs() <= 1e-8);
        assert!((r[2] - 5.030_825_485_034_346_1).abs() <= 1e-8);
        assert_eq!(r[2], r[8]);
    }
}
