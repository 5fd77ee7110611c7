use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use websurf_core::theory::{c_u_variational, chernoff_suite, solve_s, ChernoffGrid, TheoryProfile};

fn constants(c: &mut Criterion) {
    c.bench_function("solve_s", |b| b.iter(|| solve_s(black_box(0.37)).unwrap()));
    c.bench_function("profile", |b| b.iter(|| TheoryProfile::new(black_box(0.37)).unwrap()));
    c.bench_function("c_u_variational/1000", |b| {
        b.iter(|| c_u_variational(black_box(0.37), 1000).unwrap())
    });
}

fn suite(c: &mut Criterion) {
    let grid = ChernoffGrid::default();
    let mut group = c.benchmark_group("chernoff");
    group.sample_size(10);
    group.bench_function("suite", |b| b.iter(|| chernoff_suite(black_box(&grid)).unwrap()));
    group.finish();
}

criterion_group!(benches, constants, suite);
criterion_main!(benches);
