use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dbar_bench::{bump_1d, bump_2d, exact_2d};
use dbar_core::cauchy::{cauchy_transform, moment_table};
use dbar_core::corona_ops::{decompose, DecomposeOptions};
use dbar_core::solver::{solve, SolveOptions};
use std::hint::black_box;

fn cauchy(c: &mut Criterion) {
    let mut group = c.benchmark_group("cauchy_transform");
    for res in [128, 256, 512] {
        let phi = bump_1d(res);
        group.bench_with_input(BenchmarkId::new("n1", res), &phi, |b, phi| b.iter(|| cauchy_transform(black_box(phi), 0).unwrap()));
    }
    let phi = bump_2d(32);
    group.bench_function("n2/32", |b| b.iter(|| cauchy_transform(black_box(&phi), 1).unwrap()));
    group.finish();
}

fn moments(c: &mut Criterion) {
    let phi = bump_1d(512);
    c.bench_function("moment_table/n1/512/l12", |b| b.iter(|| moment_table(black_box(&phi), 0, &[], 12).unwrap()));
}

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    group.sample_size(10);
    let phi = bump_2d(32);
    group.bench_function("n2/32", |b| b.iter(|| decompose(black_box(&phi), &DecomposeOptions::default()).unwrap()));
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    let w = exact_2d(48, 1);
    group.bench_function("01/n2/48", |b| b.iter(|| solve(black_box(&w), &SolveOptions::default()).unwrap()));
    group.finish();
}

criterion_group!(benches, cauchy, moments, decomposition, solver);
criterion_main!(benches);
