use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dispersion_core::riesz::GRAM_TOL;
use dispersion_core::{
    fft_deconvolve, CharFn, DispersionModel, Kernel, Normalizer, TranslateSystem, UnitDeviance,
    Window,
};

fn kernel(phi: CharFn) -> Kernel {
    Kernel::new(UnitDeviance::new(phi, phi).unwrap(), 1.0).unwrap()
}

fn bench_integral(c: &mut Criterion) {
    let w = Window::default();
    let mut group = c.benchmark_group("kernel_integral");
    for (name, phi) in [
        ("normal", CharFn::Normal { sigma: 1.0 }),
        ("laplace", CharFn::Laplace { b: 1.0 }),
        ("stable", CharFn::SymmetricStable { alpha: 1.5, c: 1.0 }),
    ] {
        let k = kernel(phi);
        group.bench_function(name, |b| b.iter(|| k.integral(black_box(&w), 1e-10).unwrap()));
    }
    group.finish();
}

fn bench_gram(c: &mut Criterion) {
    let k = kernel(CharFn::Laplace { b: 1.0 });
    let system = TranslateSystem::rational(k, 8, Window::default()).unwrap();
    c.bench_function("gram_matrix_8", |b| b.iter(|| system.gram_matrix(GRAM_TOL).unwrap()));
}

fn bench_fft(c: &mut Criterion) {
    let k = kernel(CharFn::Normal { sigma: 1.0 });
    let mut group = c.benchmark_group("fft_deconvolve");
    for n in [1024, 4096, 16384] {
        let w = Window::new(-20.0, 20.0, n).unwrap();
        group.bench_function(n.to_string(), |b| b.iter(|| fft_deconvolve(&k, black_box(&w)).unwrap()));
    }
    group.finish();
}

fn bench_sample(c: &mut Criterion) {
    let k = kernel(CharFn::Normal { sigma: 1.0 });
    let w = Window::default();
    let model = DispersionModel::new(k, Normalizer::trivial(&k, &w, 1e-10).unwrap()).unwrap();
    c.bench_function("sample_10k", |b| b.iter(|| model.sample(0.0, 10_000, black_box(1)).unwrap()));
}

criterion_group!(benches, bench_integral, bench_gram, bench_fft, bench_sample);
criterion_main!(benches);
