use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use websurf_bench::fixture;
use websurf_core::metrics::{diameter, height};
use websurf_core::pagerank::pagerank;
use websurf_core::{graph, ModelConfig, SeedSpec};

fn generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    for n in [10_000usize, 100_000] {
        let surfer = ModelConfig::surfer(n, 3, 0.3, SeedSpec::new(1, 0));
        group.bench_with_input(BenchmarkId::new("surfer", n), &surfer, |b, c| {
            b.iter(|| graph::generate(black_box(c)).unwrap())
        });
    }
    let pr = ModelConfig::pagerank(2_000, 3, 0.3, 0.5, SeedSpec::new(1, 0));
    group.bench_function("pagerank/2000", |b| b.iter(|| graph::generate(black_box(&pr)).unwrap()));
    group.finish();
}

fn measure(c: &mut Criterion) {
    let g = fixture(100_000, 3, 0.3);
    let tree = fixture(100_000, 1, 0.3);
    c.bench_function("height/100000", |b| b.iter(|| height(black_box(&g))));
    c.bench_function("diameter/d3/100000", |b| b.iter(|| diameter(black_box(&g))));
    c.bench_function("diameter/d1/100000", |b| b.iter(|| diameter(black_box(&tree))));
    let small = fixture(5_000, 3, 0.3);
    c.bench_function("pagerank/5000", |b| b.iter(|| pagerank(black_box(&small), 0.3, 1e-10).unwrap()));
}

criterion_group!(benches, generate, measure);
criterion_main!(benches);
