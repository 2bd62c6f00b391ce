use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use unso_bench::{label, scaled_inputs};
use unso_core::defaults::{cesista_schedule, unso_coefficients};
use unso_core::densemat::FlopsCounter;
use unso_core::ortho::{cesista_ns, muon_ns, original_ns, unso, MUON_ITERATIONS, ORIGINAL_NS_ITERATIONS};
use unso_core::Scaling;

fn kernels(c: &mut Criterion) {
    let coeffs = unso_coefficients();
    let schedule = cesista_schedule();
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);

    for (shape, x) in scaled_inputs(Scaling::FrobeniusGram) {
        group.bench_with_input(BenchmarkId::new("unso", label(shape)), &x, |b, x| {
            b.iter(|| unso(black_box(x), &coeffs, &mut FlopsCounter::new()).unwrap())
        });
    }
    for (shape, x) in scaled_inputs(Scaling::FrobeniusPlain) {
        group.bench_with_input(BenchmarkId::new("original", label(shape)), &x, |b, x| {
            b.iter(|| original_ns(black_box(x), ORIGINAL_NS_ITERATIONS, &mut FlopsCounter::new()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("muon", label(shape)), &x, |b, x| {
            b.iter(|| muon_ns(black_box(x), MUON_ITERATIONS, &mut FlopsCounter::new()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("cesista", label(shape)), &x, |b, x| {
            b.iter(|| cesista_ns(black_box(x), &schedule, &mut FlopsCounter::new()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
