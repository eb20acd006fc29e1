//! Brute-force grid searches in the plane, kept separate from the library's
//! estimators, against which the enclosures are checked.

use std::f64::consts::TAU;

use banachlab::catalog::{build_arc2d, build_lp, Arc2DSpec};
use banachlab::moduli::{delta_convexity, nonsquareness, rho_smoothness};
use banachlab::normcore::{dual_norm, dual_space};
use banachlab::{Functional, NormedSpace, Resolution};

const N: usize = 1500;
const GRID_SLACK: f64 = 5e-3;

fn sphere(s: &NormedSpace, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            let r = s.norm(&[t.cos(), t.sin()]);
            [t.cos() / r, t.sin() / r]
        })
        .collect()
}

fn brute_delta(s: &NormedSpace, eps: f64) -> f64 {
    let pts = sphere(s, N);
    let mut best = f64::INFINITY;
    for x in &pts {
        for y in &pts {
            if s.norm(&[x[0] - y[0], x[1] - y[1]]) >= eps {
                best = best.min(1.0 - s.norm(&[(x[0] + y[0]) / 2.0, (x[1] + y[1]) / 2.0]));
            }
        }
    }
    best
}

fn brute_rho(s: &NormedSpace, tau: f64) -> f64 {
    let pts = sphere(s, N);
    let mut best = f64::NEG_INFINITY;
    for x in &pts {
        for y in &pts {
            let v = 0.5 * (s.norm(&[x[0] + tau * y[0], x[1] + tau * y[1]]) + s.norm(&[x[0] - tau * y[0], x[1] - tau * y[1]])) - 1.0;
            best = best.max(v);
        }
    }
    best
}

fn brute_ns(s: &NormedSpace) -> f64 {
    let pts = sphere(s, N);
    let mut best = f64::NEG_INFINITY;
    for x in &pts {
        for y in &pts {
            let a = s.norm(&[x[0] + y[0], x[1] + y[1]]);
            let b = s.norm(&[x[0] - y[0], x[1] - y[1]]);
            best = best.max(a.min(b) / 2.0);
        }
    }
    best
}

fn spaces() -> Vec<NormedSpace> {
    vec![
        build_lp(2, 3.0).unwrap(),
        build_lp(2, 1.5).unwrap(),
        build_arc2d(&Arc2DSpec::preset("ex61").unwrap()).unwrap(),
        build_arc2d(&Arc2DSpec::preset("fig5").unwrap()).unwrap(),
    ]
}

#[test]
fn infima_against_grid_search() {
    let res = Resolution::default();
    for s in spaces() {
        for eps in [0.5, 1.25] {
            let e = delta_convexity(&s, eps, &res).unwrap();
            let b = brute_delta(&s, eps);
            // The grid value is feasible, so it sits above the true infimum.
            assert!(e.lo <= b + 1e-12, "{} eps={eps}: lo {} > grid {b}", s.label(), e.lo);
            assert!(b <= e.hi + GRID_SLACK, "{} eps={eps}: grid {b} far above hi {}", s.label(), e.hi);
        }
    }
}

#[test]
fn suprema_against_grid_search() {
    let res = Resolution::default();
    for s in spaces() {
        let e = rho_smoothness(&s, 0.5, &res).unwrap();
        let b = brute_rho(&s, 0.5);
        assert!(b <= e.hi + 1e-12 && e.lo <= b + GRID_SLACK, "{} rho: [{}, {}] vs {b}", s.label(), e.lo, e.hi);
        let e = nonsquareness(&s, &res).unwrap();
        let b = brute_ns(&s);
        assert!(b <= e.hi + 1e-12 && e.lo <= b + GRID_SLACK, "{} NS: [{}, {}] vs {b}", s.label(), e.lo, e.hi);
    }
}

#[test]
fn dual_norms_against_boundary_maximum() {
    let res = Resolution::default();
    for s in spaces() {
        let pts = sphere(&s, 20_000);
        for k in 0..24 {
            let t = 0.2618 * k as f64 + 0.05;
            let f = [2.0 * t.cos(), 2.0 * t.sin()];
            let b = pts.iter().map(|x| f[0] * x[0] + f[1] * x[1]).fold(f64::NEG_INFINITY, f64::max);
            let e = dual_norm(&s, &Functional::new(f.to_vec()).unwrap(), &res).unwrap();
            assert!(b <= e.hi + 1e-9 && e.lo <= b + 1e-6, "{} f={f:?}: [{}, {}] vs {b}", s.label(), e.lo, e.hi);
            assert!(e.width() < 1e-3);
        }
    }
}

#[test]
fn dual_of_l1_is_max_norm_on_samples() {
    let res = Resolution::default();
    let d = dual_space(&build_lp(2, 1.0).unwrap(), &res);
    for k in 0..100 {
        let t = 0.0731 * k as f64;
        let g = [1.7 * t.cos(), 0.9 * t.sin()];
        assert!((d.norm(&g) - g[0].abs().max(g[1].abs())).abs() < 1e-3);
    }
}
