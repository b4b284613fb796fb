use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use shimorin::berg_duran::{fit_discrete_measure, omega_moments_from_nu, reciprocal_partial_sums};
use shimorin::charfit::{fit_h, FitProblem};
use shimorin::kernels::eval_integral;
use shimorin::reference::{lebesgue, test_family, two_point};
use shimorin::{BernsteinFunction, DiskPoint, KernelSeries, MomentSequence, Provenance};

fn coefficients(c: &mut Criterion) {
    let f = BernsteinFunction::new(lebesgue());
    c.bench_function("kernel coefficients, Lebesgue, N = 1000", |b| b.iter(|| f.kernel_coefficients(black_box(1000))));
    let (_, mixed) = test_family().into_iter().find(|(n, _)| *n == "mixed").unwrap();
    let f = BernsteinFunction::new(mixed);
    c.bench_function("Bernstein function, mixed measure", |b| b.iter(|| f.eval(black_box(17.5))));
}

fn evaluation(c: &mut Criterion) {
    let nu = lebesgue();
    let p = DiskPoint::real(0.5).unwrap();
    let series = KernelSeries::from_bernstein(&BernsteinFunction::new(nu.clone()), 80);
    c.bench_function("series at x = 0.5", |b| b.iter(|| series.eval_series(black_box(&p), 1e-10)));
    c.bench_function("integral at x = 0.5", |b| b.iter(|| eval_integral(&nu, black_box(&p))));
}

fn moments(c: &mut Criterion) {
    let nu = lebesgue();
    c.bench_function("induced weight moments, N = 200", |b| b.iter(|| omega_moments_from_nu(&nu, black_box(200))));
    let a = MomentSequence::new(nu.moments(12), Provenance::NuMoments).unwrap();
    let target = reciprocal_partial_sums(&a).unwrap();
    let grid: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
    c.bench_function("discrete reconstruction, 64 atoms", |b| {
        b.iter(|| fit_discrete_measure(&target, black_box(&grid), 1e-10))
    });
}

fn fitting(c: &mut Criterion) {
    let problem = FitProblem::new(two_point(1.0, 2.0));
    c.bench_function("log-convex fit, two-point measure", |b| b.iter(|| fit_h(black_box(&problem))));
    let problem = FitProblem::new(lebesgue());
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("log-convex fit, Lebesgue", |b| b.iter(|| fit_h(black_box(&problem))));
    group.finish();
}

criterion_group!(benches, coefficients, evaluation, moments, fitting);
criterion_main!(benches);
