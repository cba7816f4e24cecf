use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sparse_stress::distances::mssp;
use sparse_stress::solvers::{FullStress, SparseModel, StressModel};
use sparse_stress_bench::{grid, maxmin_pivots, start_layout};

fn sparse_sweep(c: &mut Criterion) {
    let g = grid(100);
    let x0 = start_layout(&g, 0);
    let mut group = c.benchmark_group("sparse_sweep_grid100");
    group.sample_size(20);
    for k in [50, 100, 200] {
        let model = SparseModel::new(&g, &maxmin_pivots(&g, k, 0)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            let mut x = x0.clone();
            b.iter(|| model.sweep(black_box(&mut x)));
        });
    }
    group.finish();
}

fn full_sweep(c: &mut Criterion) {
    let g = grid(32);
    let x0 = start_layout(&g, 0);
    let model = FullStress::new(&g).unwrap();
    c.bench_function("full_sweep_grid32", |b| {
        let mut x = x0.clone();
        b.iter(|| model.sweep(black_box(&mut x)));
    });
}

fn pivot_distances(c: &mut Criterion) {
    let g = grid(100);
    let pivots = maxmin_pivots(&g, 200, 0);
    let mut group = c.benchmark_group("mssp_grid100");
    group.sample_size(10);
    group.bench_function("k200", |b| {
        b.iter(|| mssp(black_box(&g), black_box(&pivots)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sparse_sweep, full_sweep, pivot_distances);
criterion_main!(benches);
