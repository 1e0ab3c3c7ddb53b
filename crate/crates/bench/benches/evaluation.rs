use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use zetacont::oracle::zeta_euler_maclaurin;
use zetacont::series_eval::{BlockMethod, PreparedSeries};
use zetacont::{eval_truncated, EvalOptions};
use zetacont_bench::{critical, fixture};

fn blocks(c: &mut Criterion) {
    let mut group = c.benchmark_group("block");
    for m in [6u64, 24, 60] {
        let (_, sw) = fixture(m);
        let series = PreparedSeries::new(&sw);
        let s = critical(1e5);
        for (name, method, n) in [
            ("term_order", BlockMethod::TermOrder, 1_000u64),
            ("expansion", BlockMethod::Auto, 1_000_000),
        ] {
            let ev = series.at(s, method);
            group.throughput(Throughput::Elements(m));
            group.bench_with_input(BenchmarkId::new(name, m), &n, |b, &n| {
                b.iter(|| ev.block(black_box(n)).unwrap())
            });
        }
    }
    group.finish();
}

fn truncated(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval_truncated");
    group.sample_size(10);
    let (_, sw) = fixture(6);
    let s = critical(1e5);
    let n = 100_000u64;
    group.throughput(Throughput::Elements(6 * n));
    for (name, opts) in [
        ("seq", EvalOptions::default()),
        ("par", EvalOptions::parallel()),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| eval_truncated(&sw, black_box(s), n, opts).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("euler_maclaurin");
    group.sample_size(10);
    for t in [1e3, 1e5] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| zeta_euler_maclaurin(critical(t), 1e-10).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, blocks, truncated, oracle);
criterion_main!(benches);
