//! Cross-checks against independent brute-force oracles and frozen
//! high-precision reference values.

use approx::assert_relative_eq;
use dispersion_core::figures::cosine_gaussian;
use dispersion_core::riesz::{rational_enumeration, GRAM_TOL};
use dispersion_core::{
    fft_deconvolve, orthogonality_residual, CharFn, Kernel, Normalizer, TranslateSystem,
    UnitDeviance, Window,
};

fn laplace_kernel() -> Kernel {
    let l = CharFn::Laplace { b: 1.0 };
    Kernel::new(UnitDeviance::new(l, l).unwrap(), 1.0).unwrap()
}

fn normal_kernel() -> Kernel {
    let n = CharFn::Normal { sigma: 1.0 };
    Kernel::new(UnitDeviance::new(n, n).unwrap(), 1.0).unwrap()
}

/// Midpoint rule with Neumaier summation; closed-form kernel, no library code.
fn midpoint<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in 0..n {
        let v = f(lo + (i as f64 + 0.5) * h);
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    (sum + comp) * h
}

fn laplace_closed(y: f64) -> f64 {
    let u = 1.0 / (1.0 + y * y);
    (-(1.0 - u) * u).exp()
}

/// Cyclic Jacobi eigenvalues, ascending.
fn jacobi_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn trivial_normalizer_matches_midpoint() {
    let w = Window::default();
    let quad = Normalizer::trivial(&laplace_kernel(), &w, 1e-10).unwrap();
    let oracle = midpoint(laplace_closed, -20.0, 20.0, 1_000_000);
    assert_relative_eq!(quad.a_tilde, 1.0 / oracle, max_relative = 1e-10);
}

#[test]
fn fft_constant_matches_quadrature() {
    let w = Window::default();
    for k in [normal_kernel(), laplace_kernel()] {
        let quad = Normalizer::trivial(&k, &w, 1e-10).unwrap().a_tilde;
        let r = fft_deconvolve(&k, &w).unwrap();
        assert_relative_eq!(r.dc_value, quad, max_relative = 1e-6);
        assert!(r.non_constancy <= 1e-10 * r.dc_value);
        // and against the hand-rolled lag sum
        let n = w.n_grid;
        let step = w.width() / n as f64;
        let mass: f64 = (0..n)
            .map(|j| {
                let off = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                k.eval(off * step)
            })
            .sum::<f64>()
            * step;
        assert_relative_eq!(r.dc_value, 1.0 / mass, max_relative = 1e-12);
    }
}

#[test]
fn orthogonality_residual_matches_brute_force() {
    let f = cosine_gaussian();
    let w = Window::default();
    let mus = [-5.0, -2.5, 0.0, 1.0, 4.0];
    let got = orthogonality_residual(&f, &laplace_kernel(), &w, &mus, 1e-10).unwrap();
    for (&mu, &g) in mus.iter().zip(&got) {
        let oracle = midpoint(
            |y| ((3.0 * y).cos() + 1.0) * (-y * y / 10.0).exp() * laplace_closed(mu - y),
            -20.0,
            20.0,
            400_000,
        );
        assert!((g - oracle).abs() <= 1e-8, "mu = {mu}: {g} vs {oracle}");
    }
}

#[test]
fn gram_eigenvalues_match_references() {
    // ascending eigenvalues of the nested systems, 30-digit references
    let reference: [&[f64]; 4] = [
        &[37.406_218_289_536_642],
        &[0.034_538_906_775_582_357, 74.777_897_672_297_701],
        &[
            0.007_886_270_937_847_391_9,
            0.034_092_235_613_470_805,
            0.046_541_100_225_221_952,
            149.536_353_551_370_03,
        ],
        &[
            0.000_123_325_702_824_936_64,
            0.003_168_427_686_256_402_8,
            0.013_744_815_137_696_38,
            0.031_871_917_903_516_205,
            0.043_399_431_529_392_959,
            0.060_396_195_215_785_288,
            0.080_644_025_398_925_645,
            299.016_398_177_718_73,
        ],
    ];
    let system = TranslateSystem::rational(laplace_kernel(), 8, Window::default()).unwrap();
    let full = system.gram_matrix(GRAM_TOL).unwrap();
    for (size, want) in [1usize, 2, 4, 8].into_iter().zip(reference) {
        let report = full.leading(size).unwrap();
        let jacobi = jacobi_eigenvalues(&report.gram);
        for ((got, oracle), exact) in report.eigenvalues.iter().zip(&jacobi).zip(want) {
            assert!((got - oracle).abs() <= 1e-10 * full.max_eigenvalue);
            assert!((got - exact).abs() <= 1e-8, "n = {size}: {got} vs {exact}");
        }
    }
}

#[test]
fn separately_built_systems_agree_with_submatrices() {
    let w = Window::default();
    let full = TranslateSystem::rational(laplace_kernel(), 4, w)
        .unwrap()
        .gram_matrix(GRAM_TOL)
        .unwrap();
    let two = TranslateSystem::new(laplace_kernel(), rational_enumeration(2), w)
        .unwrap()
        .gram_matrix(GRAM_TOL)
        .unwrap();
    assert_eq!(two.gram, full.leading(2).unwrap().gram);
}
