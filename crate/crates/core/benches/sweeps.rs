use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lpmink::closed_forms::{FacetOrigin, Grid, VanishingLine};
use lpmink::monge_ampere::{check_alexandrov, AlexandrovOptions, Density, Domain, PLConvexFunction};
use lpmink::selftest;
use lpmink::Exec;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn vanishing_line_grid(c: &mut Criterion) {
    let ex = VanishingLine::new(3, 0.5, 0.05).unwrap();
    let mut group = c.benchmark_group("vanishing_line_grid");
    for side in [100, 400] {
        let grid = Grid { n_x1: side, n_r: side, r_min: 1e-4 };
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, side), &grid, |b, g| {
                b.iter(|| black_box(ex.verify(g, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn alexandrov_check(c: &mut Criterion) {
    let ex = FacetOrigin::new(3, 0.5).unwrap();
    let h = 1.0 / 32.0;
    let mut samples = Vec::new();
    for i in -1..=17 {
        for j in -1..=17 {
            let y = vec![0.25 + i as f64 * h, 0.25 + j as f64 * h];
            samples.push((y.clone(), ex.value_at(&y).unwrap(), ex.gradient_at(&y).unwrap()));
        }
    }
    let dom = Domain::rectangle([0.25, 0.25], [0.75, 0.75]).unwrap();
    let v = PLConvexFunction::from_tangent_planes(dom, &samples).unwrap();
    let g = Density::FacetOriginRhs(ex);
    let mut group = c.benchmark_group("alexandrov_check");
    for (name, exec) in STRATEGIES {
        let opts = AlexandrovOptions { tol: 1e-6, mesh: Some(0.125), max_depth: 12, exec };
        group.bench_function(name, |b| b.iter(|| black_box(check_alexandrov(&v, &g, 0.5, &opts).unwrap())));
    }
    group.finish();
}

fn invariant_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("selftest");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| black_box(selftest::run(&[1, 2, 3, 4, 5], exec))));
    }
    group.finish();
}

criterion_group!(benches, vanishing_line_grid, alexandrov_check, invariant_suite);
criterion_main!(benches);
