use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rht_bench::{classifying, hp_bundle, sphere_family};
use rht_core::{betti, reduce};

fn betti_numbers(c: &mut Criterion) {
    let mut g = c.benchmark_group("betti");
    for n in [2u32, 3, 4] {
        let m = sphere_family(n);
        g.bench_with_input(BenchmarkId::new("sphere_family", n), &m, |b, m| {
            b.iter(|| betti(black_box(m), 8 * n).unwrap())
        });
    }
    for rank in [2u32, 3] {
        let m = hp_bundle(2, rank);
        g.bench_with_input(BenchmarkId::new("hp2_bundle", rank), &m, |b, m| {
            b.iter(|| betti(black_box(m), 24).unwrap())
        });
    }
    let m = classifying(4);
    g.bench_function("bsp4_to_40", |b| b.iter(|| betti(black_box(&m), 40).unwrap()));
    g.finish();
}

fn reduction(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduce");
    for n in [2u32, 3, 4] {
        let m = sphere_family(n);
        g.bench_with_input(BenchmarkId::new("unchecked", n), &m, |b, m| {
            b.iter(|| reduce(black_box(m), 0).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("checked", n), &m, |b, m| {
            b.iter(|| reduce(black_box(m), 8 * n).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, betti_numbers, reduction);
criterion_main!(benches);
