//! Maximal line segments on a planar unit sphere.

use serde::{Deserialize, Serialize};

use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::normcore::plane::{circle_nodes, cross2, dot2, sphere_point, SpherePoint, P2};
use crate::normcore::{dual_norm, Functional, NormedSpace};

/// Points with `n·p >= 1 - FLAT_TOL` count as lying on the line `n·p = 1`.
const FLAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatSegment {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// `‖end − start‖`.
    pub length: f64,
    /// The functional norming every point of the segment.
    pub normal: Vec<f64>,
    pub start_smooth: bool,
    pub end_smooth: bool,
    /// Extreme points of the subdifferential at each endpoint; the first
    /// member is always `normal`.
    pub start_functionals: [Vec<f64>; 2],
    pub end_functionals: [Vec<f64>; 2],
}

/// Line `n·p = 1` through two points of the sphere.
fn line_through(a: P2, b: P2) -> Option<P2> {
    let det = cross2(a, b);
    if det.abs() < 1e-14 {
        return None;
    }
    Some([(b[1] - a[1]) / det, (a[0] - b[0]) / det])
}

fn on_line(n: P2, p: P2) -> bool {
    dot2(n, p) >= 1.0 - FLAT_TOL
}

/// Bisects the angle interval `[off, on]` for the last angle whose sphere
/// point still lies on the line. Returns the points on each side.
fn boundary(space: &NormedSpace, n: P2, mut off: f64, mut on: f64) -> (SpherePoint, SpherePoint) {
    for _ in 0..64 {
        let mid = 0.5 * (off + on);
        if mid == off || mid == on {
            break;
        }
        if on_line(n, sphere_point(space, mid).x) {
            on = mid;
        } else {
            off = mid;
        }
    }
    (sphere_point(space, off), sphere_point(space, on))
}

fn pairing_gap(space: &NormedSpace, f: P2, g: P2, res: &Resolution) -> Result<f64> {
    Ok(dual_norm(space, &Functional::new(vec![f[0] - g[0], f[1] - g[1]])?, res)?.hi)
}

/// Maximal segments of the unit sphere, with smoothness of each endpoint
/// judged at `tol` in the dual norm.
pub fn flat_segments_2d(space: &NormedSpace, tol: f64, res: &Resolution) -> Result<Vec<FlatSegment>> {
    if space.dim() != 2 {
        return Err(Error::UnsupportedDimension { expected: 2, got: space.dim() });
    }
    let m = res.angles.max(4096);
    let m = m + m % 2;
    let nodes = circle_nodes(space, m);
    let node = |k: usize| &nodes[k % m];
    let theta = |k: usize| node(k).theta + if k >= m { std::f64::consts::TAU * (k / m) as f64 } else { 0.0 };
    let flat_arc = |k: usize| {
        let (a, b) = (node(k).x, node(k + 1).x);
        space.norm(&[0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]) >= 1.0 - FLAT_TOL
    };
    // A run of collinear flat arcs cannot continue through arc `k - 1` into arc `k`.
    let starts_run = |k: usize| {
        let prev = k + m - 1;
        !flat_arc(prev) || !flat_arc(k) || line_through(node(k).x, node(k + 1).x).is_none_or(|n| !on_line(n, node(prev).x))
    };
    let Some(s) = (0..m).find(|&k| starts_run(k)) else {
        return Err(Error::InvalidBoundary("no sampled arc ends a flat run".into()));
    };
    let mut out = Vec::new();
    let mut k = s;
    while k < s + m {
        if !flat_arc(k) {
            k += 1;
            continue;
        }
        let first = k;
        let n = line_through(node(k).x, node(k + 1).x).expect("flat arc");
        while k + 1 < s + m && flat_arc(k + 1) && on_line(n, node(k + 2).x) {
            k += 1;
        }
        let last = k + 1;
        let (out_a, a) = boundary(space, n, theta(first) - std::f64::consts::TAU / m as f64, theta(first));
        let (out_b, b) = boundary(space, n, theta(last) + std::f64::consts::TAU / m as f64, theta(last));
        let fa = out_a.fm;
        let fb = out_b.fp;
        let length = space.norm(&[b.x[0] - a.x[0], b.x[1] - a.x[1]]);
        out.push(FlatSegment {
            start: a.x.to_vec(),
            end: b.x.to_vec(),
            length,
            normal: n.to_vec(),
            start_smooth: pairing_gap(space, n, fa, res)? <= tol,
            end_smooth: pairing_gap(space, n, fb, res)? <= tol,
            start_functionals: [n.to_vec(), fa.to_vec()],
            end_functionals: [n.to_vec(), fb.to_vec()],
        });
        k = last;
    }
    Ok(out)
}
