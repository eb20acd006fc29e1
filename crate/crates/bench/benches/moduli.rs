use std::hint::black_box;

use banachlab::classify::{classify, DEFAULT_TOL};
use banachlab::moduli::{delta_convexity, delta_uacs, rho_uacs};
use banachlab::normcore::dual_norm;
use banachlab::{Functional, Resolution};
use banachlab_bench::{plane_spaces, space};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn plane_moduli(c: &mut Criterion) {
    let res = Resolution::default();
    let mut g = c.benchmark_group("plane_moduli");
    g.sample_size(10);
    for s in plane_spaces() {
        g.bench_with_input(BenchmarkId::new("delta_X(1)", s.label()), &s, |b, s| b.iter(|| delta_convexity(s, black_box(1.0), &res).unwrap()));
        g.bench_with_input(BenchmarkId::new("delta_uacs(0.5)", s.label()), &s, |b, s| b.iter(|| delta_uacs(s, black_box(0.5), &res).unwrap()));
        g.bench_with_input(BenchmarkId::new("rho_uacs(0.25)", s.label()), &s, |b, s| b.iter(|| rho_uacs(s, black_box(0.25), &res).unwrap()));
    }
    g.finish();
}

fn fine_grid(c: &mut Criterion) {
    let res = Resolution::default().with_angles(4096);
    let e = space("lp(2,2)");
    let mut g = c.benchmark_group("fine_grid");
    g.sample_size(10);
    g.bench_function("delta_uacs(1) euclid 4096", |b| b.iter(|| delta_uacs(&e, black_box(1.0), &res).unwrap()));
    g.finish();
}

fn duals(c: &mut Criterion) {
    let res = Resolution::default();
    let f = Functional::new(vec![0.3, -1.1]).unwrap();
    let mut g = c.benchmark_group("dual_norm");
    for s in plane_spaces() {
        g.bench_with_input(BenchmarkId::from_parameter(s.label()), &s, |b, s| b.iter(|| dual_norm(s, black_box(&f), &res).unwrap()));
    }
    let s3 = space("lp(3,1.5)");
    let f3 = Functional::new(vec![0.3, -1.1, 0.7]).unwrap();
    g.bench_function("lp(3,1.5)", |b| b.iter(|| dual_norm(&s3, black_box(&f3), &res).unwrap()));
    g.finish();
}

fn classification(c: &mut Criterion) {
    let res = Resolution::default();
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    for s in plane_spaces() {
        g.bench_with_input(BenchmarkId::from_parameter(s.label()), &s, |b, s| b.iter(|| classify(s, DEFAULT_TOL, &res).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, plane_moduli, fine_grid, duals, classification);
criterion_main!(benches);
