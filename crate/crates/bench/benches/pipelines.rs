use bb84sc::rates::{critical_qber, evaluate_strategy2, RateOptions};
use bb84sc::strategies::{run_strategy1, run_strategy3, FailureAccounting, Strategy};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn pipelines(c: &mut Criterion) {
    c.bench_function("run_strategy1", |b| {
        b.iter(|| run_strategy1(black_box(0.6), black_box(0.4)).unwrap())
    });
    c.bench_function("evaluate_strategy2", |b| {
        b.iter(|| {
            evaluate_strategy2(
                black_box(0.6),
                black_box(0.5),
                FailureAccounting::Postselect,
            )
            .unwrap()
        })
    });
    c.bench_function("run_strategy3", |b| {
        b.iter(|| run_strategy3(black_box(0.6), black_box(0.4)).unwrap())
    });
}

fn critical(c: &mut Criterion) {
    let mut group = c.benchmark_group("critical_qber");
    group.sample_size(10);
    for s in Strategy::ALL {
        group.bench_function(s.name(), |b| {
            b.iter(|| critical_qber(s, black_box(0.5), 1e-5, RateOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pipelines, critical);
criterion_main!(benches);
