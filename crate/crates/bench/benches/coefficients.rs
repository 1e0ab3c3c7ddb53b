use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zetacont::progression::{left_kernel_witness, CoefficientSystem, ProgressionModulus};
use zetacont::{default_coefficients, derive_weights, verify_vanishing};

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("coefficients");
    for m in [6u64, 24, 60, 360] {
        group.bench_with_input(BenchmarkId::new("default", m), &m, |b, &m| {
            b.iter(|| default_coefficients(black_box(m)).unwrap())
        });
    }
    let pm = ProgressionModulus::new(60).unwrap();
    group.bench_function("rref/60", |b| {
        b.iter(|| CoefficientSystem::new(black_box(&pm)))
    });
    group.bench_function("witness/720", |b| {
        let pm = ProgressionModulus::new(720).unwrap();
        b.iter(|| left_kernel_witness(black_box(&pm)).unwrap())
    });
    let (fc, _) = default_coefficients(60).unwrap();
    group.bench_function("weights/60", |b| {
        b.iter(|| {
            let sw = derive_weights(black_box(&fc));
            verify_vanishing(&sw, 12).passed()
        })
    });
    group.finish();
}

criterion_group!(benches, solve);
criterion_main!(benches);
