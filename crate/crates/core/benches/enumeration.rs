use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use chordlog::diagrams::enumerate::{catalog, generate_catalog};
use chordlog::exec::Strategy;
use chordlog::expansions::hk_bruteforce_with;

fn strategies() -> Vec<(&'static str, Strategy)> {
    let mut out = vec![("sequential", Strategy::Sequential)];
    #[cfg(feature = "parallel")]
    out.push(("parallel", Strategy::Parallel));
    out
}

fn catalogs(c: &mut Criterion) {
    let mut group = c.benchmark_group("catalog");
    group.sample_size(10);
    for n in [6, 7] {
        for (name, strategy) in strategies() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| b.iter(|| generate_catalog(n, strategy)));
        }
    }
    group.finish();
}

fn bruteforce(c: &mut Criterion) {
    for n in 1..=8 {
        catalog(n);
    }
    let mut group = c.benchmark_group("hk_bruteforce");
    group.sample_size(10);
    for (k, s) in [(2, 2), (3, 3)] {
        for (name, strategy) in strategies() {
            let id = BenchmarkId::new(name, format!("k{k}_s{s}"));
            group.bench_function(id, |b| b.iter(|| hk_bruteforce_with(k, s, 5, strategy)));
        }
    }
    group.finish();
}

criterion_group!(benches, catalogs, bruteforce);
criterion_main!(benches);
