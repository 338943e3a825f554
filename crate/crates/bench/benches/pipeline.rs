use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hamcore::matching::{max_matching, max_two_matching};
use hamcore::packer::{pack, PackerConfig};
use hamcore::random_models::{MinDegreeSampler, SimpleMethod};
use hamcore::{k_core, seed, Graph};

fn sample(n: usize, c: f64, k: usize, s: u64) -> Graph {
    MinDegreeSampler::new(n, (c * n as f64) as usize, k)
        .method(SimpleMethod::Auto)
        .sample(&mut seed::rng(s))
        .unwrap()
}

fn matchings(c: &mut Criterion) {
    let mut group = c.benchmark_group("matching");
    for n in [1000, 4000] {
        let g = sample(n, 3.0, 4, 1);
        group.bench_with_input(BenchmarkId::new("max_matching", n), &g, |b, g| b.iter(|| max_matching(g)));
        group.bench_with_input(BenchmarkId::new("max_two_matching", n), &g, |b, g| b.iter(|| max_two_matching(g)));
    }
    group.finish();
}

fn cores(c: &mut Criterion) {
    let g = sample(20000, 3.0, 3, 2);
    c.bench_function("k_core/20000", |b| b.iter(|| k_core(&g, 4)));
}

fn packing(c: &mut Criterion) {
    let mut group = c.benchmark_group("pack");
    group.sample_size(10);
    for (n, k, cc) in [(1000, 4, 3.0), (4000, 4, 3.0), (4000, 5, 3.5)] {
        let g = sample(n, cc, k, 3);
        let cfg = PackerConfig::new(k);
        group.bench_with_input(BenchmarkId::new(format!("k{k}"), n), &g, |b, g| {
            b.iter(|| pack(g, &cfg, &mut seed::rng(4)).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    group.sample_size(10);
    group.bench_function("gnm_mindeg/4000", |b| b.iter(|| sample(4000, 3.0, 4, 5)));
    group.finish();
}

criterion_group!(benches, matchings, cores, packing, sampling);
criterion_main!(benches);
