//! Sequential vs. parallel paths of the projector and the TV terms.
//!
//! Build with `--no-default-features` to measure the plain sequential code
//! under both names; the default build routes the unsuffixed entry points
//! through the thread pool. The outputs are bitwise identical either way,
//! so these benches are purely about throughput.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scs::ct::{phantom, projector, tv, CtObjective, Geometry, Sinogram};
use scs::oracle::ObjectiveOracle;

const SIDES: [usize; 2] = [64, 128];

fn bench_forward(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_project");
    for n in SIDES {
        let img = phantom::shepp_logan(n);
        let geom = Geometry::with_default_detectors(n, n);
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |b, _| {
            b.iter(|| projector::forward_project_seq(black_box(&img), &geom))
        });
        group.bench_with_input(BenchmarkId::new("par", n), &n, |b, _| {
            b.iter(|| projector::forward_project(black_box(&img), &geom))
        });
    }
    group.finish();
}

fn bench_back(c: &mut Criterion) {
    let mut group = c.benchmark_group("back_project");
    for n in SIDES {
        let geom = Geometry::with_default_detectors(n, n);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = Sinogram::from_vec(
            geom.n_views(),
            geom.n_det(),
            (0..geom.ray_count()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        );
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |b, _| {
            b.iter(|| projector::back_project_seq(black_box(&r), &geom))
        });
        group.bench_with_input(BenchmarkId::new("par", n), &n, |b, _| {
            b.iter(|| projector::back_project(black_box(&r), &geom))
        });
    }
    group.finish();
}

fn bench_tv(c: &mut Criterion) {
    let mut group = c.benchmark_group("tv");
    for n in SIDES {
        let img = phantom::three_phases(n, 5);
        group.bench_with_input(BenchmarkId::new("value_seq", n), &n, |b, _| {
            b.iter(|| tv::tv_value_seq(black_box(&img)))
        });
        group.bench_with_input(BenchmarkId::new("value_par", n), &n, |b, _| {
            b.iter(|| tv::tv_value(black_box(&img)))
        });
        group.bench_with_input(BenchmarkId::new("subgradient_seq", n), &n, |b, _| {
            b.iter(|| tv::tv_subgradient_seq(black_box(&img)))
        });
        group.bench_with_input(BenchmarkId::new("subgradient_par", n), &n, |b, _| {
            b.iter(|| tv::tv_subgradient(black_box(&img)))
        });
    }
    group.finish();
}

fn bench_objective(c: &mut Criterion) {
    let mut group = c.benchmark_group("ct_objective");
    for n in SIDES {
        let truth = phantom::shepp_logan(n);
        let geom = Geometry::with_default_detectors(n, n);
        let b_data = projector::forward_project(&truth, &geom);
        let obj = CtObjective::new(geom, b_data, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..1.0)).collect();
        group.bench_with_input(BenchmarkId::new("evaluate", n), &n, |b, _| {
            b.iter(|| obj.evaluate(black_box(&x)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_forward, bench_back, bench_tv, bench_objective);
criterion_main!(benches);
