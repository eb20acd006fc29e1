use std::collections::BinaryHeap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::plane::{ball_polygons, circle_nodes, dot2, primal_hull, sphere_point, SpherePoint, P2};
use super::space::{Equivalence, NormedSpace};
use super::vector::{dot, euclid, Functional, Vector};
use crate::config::Resolution;
use crate::error::Result;
use crate::optim::circle_max;

/// Interval enclosing a derived norm value, with the point attaining `lo`
/// (dual norm) or `hi` (quotient norm).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub witness: Option<Vector>,
    pub certified: bool,
}

impl Enclosure {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.lo - slack && v <= self.hi + slack
    }
}

/// How `dual_space` realises the dual norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMode {
    /// Closed form when the space carries one, numerical otherwise.
    Auto,
    /// Always tabulate or optimise numerically.
    Numeric,
}

/// `sup { f(x) : ||x|| <= 1 }`.
pub fn dual_norm(space: &NormedSpace, f: &Functional, res: &Resolution) -> Result<Enclosure> {
    space.check_dim(f.dim())?;
    if f.is_zero() {
        return Ok(Enclosure { lo: 0.0, hi: 0.0, witness: None, certified: true });
    }
    match space.dim() {
        1 => {
            let v = f.coords()[0].abs() / space.norm(&[1.0]);
            let x = Vector::new(vec![f.coords()[0].signum() / space.norm(&[1.0])])?;
            Ok(Enclosure { lo: v, hi: v, witness: Some(x), certified: true })
        }
        2 => Ok(dual_norm_plane(space, [f.coords()[0], f.coords()[1]], res)),
        _ => {
            let (v, x) = support_nd(space, f.coords());
            Ok(Enclosure { lo: v, hi: v, witness: Some(Vector::new(x)?), certified: false })
        }
    }
}

#[derive(PartialEq)]
struct Arc1 {
    ub: f64,
    a: SpherePoint,
    b: SpherePoint,
    depth: u32,
}

impl Eq for Arc1 {}

impl PartialOrd for Arc1 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Arc1 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ub.total_cmp(&other.ub).then(other.a.theta.total_cmp(&self.a.theta))
    }
}

/// Branch and bound over boundary arcs: a linear functional attains its
/// maximum over an arc hull at a hull vertex.
fn dual_norm_plane(space: &NormedSpace, f: P2, res: &Resolution) -> Enclosure {
    let lip = space.sphere_lipschitz();
    let fstar = f[0].hypot(f[1]) / space.equivalence().lower;
    let m = res.angles.max(64);
    let nodes = circle_nodes(space, m);
    let arc_ub = |a: &SpherePoint, b: &SpherePoint| {
        let h = primal_hull(a, b, lip);
        h.verts().iter().map(|&v| dot2(f, v)).fold(f64::NEG_INFINITY, f64::max) + fstar * h.pad
    };
    let mut lo = f64::NEG_INFINITY;
    let mut arg = nodes[0].x;
    for p in &nodes[..m] {
        let v = dot2(f, p.x);
        if v > lo {
            lo = v;
            arg = p.x;
        }
    }
    let mut heap = BinaryHeap::new();
    for k in 0..m {
        let ub = arc_ub(&nodes[k], &nodes[k + 1]);
        heap.push(Arc1 { ub, a: nodes[k], b: nodes[k + 1], depth: 0 });
    }
    let target = 1e-14 * lo.abs().max(1e-300);
    let mut hi = lo;
    let mut budget = 4096usize;
    while let Some(c) = heap.pop() {
        if c.ub <= lo + target {
            hi = hi.max(c.ub);
            break;
        }
        if budget == 0 || c.depth >= 40 {
            hi = hi.max(c.ub);
            heap.clear();
            break;
        }
        budget -= 1;
        let mid = sphere_point(space, 0.5 * (c.a.theta + c.b.theta));
        let v = dot2(f, mid.x);
        if v > lo {
            lo = v;
            arg = mid.x;
        }
        for (a, b) in [(c.a, mid), (mid, c.b)] {
            heap.push(Arc1 { ub: arc_ub(&a, &b), a, b, depth: c.depth + 1 });
        }
    }
    for c in heap.iter() {
        hi = hi.max(c.ub);
    }
    let hi = hi.max(lo);
    Enclosure {
        lo,
        hi,
        witness: Some(Vector::new(arg.to_vec()).expect("finite boundary point")),
        certified: space.equivalence().certified && space.has_analytic_derivative(),
    }
}

/// Plane-ascent maximisation of `f` over the unit ball in dimension >= 3.
pub(crate) fn support_nd(space: &NormedSpace, f: &[f64]) -> (f64, Vec<f64>) {
    let n = space.dim();
    let ratio = |v: &[f64]| {
        let nv = space.norm(v);
        if nv > 0.0 {
            dot(f, v) / nv
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut starts: Vec<Vec<f64>> = vec![f.to_vec()];
    if let Some(g) = space.analytic_subgrad(f) {
        starts.push(g);
    }
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            starts.push(e);
        }
    }
    starts.push(f.iter().map(|c| c.signum()).collect());
    let mut scored: Vec<(f64, usize)> = starts.iter().enumerate().map(|(i, v)| (ratio(v), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = (f64::NEG_INFINITY, starts[0].clone());
    for &(_, i) in scored.iter().take(3) {
        let (v, x) = plane_ascent(space, f, &starts[i], &ratio);
        if v > best.0 {
            best = (v, x);
        }
    }
    let nb = space.norm(&best.1);
    let x: Vec<f64> = best.1.iter().map(|c| c / nb).collect();
    (best.0, x)
}

fn plane_ascent(space: &NormedSpace, f: &[f64], start: &[f64], ratio: &dyn Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let n = space.dim();
    let mut x = start.to_vec();
    let mut val = ratio(&x);
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    dirs.push(f.to_vec());
    for _sweep in 0..60 {
        let before = val;
        for d in &dirs {
            let r = euclid(&x);
            let xh: Vec<f64> = x.iter().map(|c| c / r).collect();
            let proj = dot(d, &xh);
            let mut w: Vec<f64> = d.iter().zip(&xh).map(|(a, b)| a - proj * b).collect();
            let wn = euclid(&w);
            if wn < 1e-12 {
                continue;
            }
            w.iter_mut().for_each(|c| *c /= wn);
            let point = |t: f64| -> Vec<f64> { xh.iter().zip(&w).map(|(a, b)| t.cos() * a + t.sin() * b).collect() };
            let (t, v) = circle_max(|t| ratio(&point(t)), 24, 60);
            if v > val {
                val = v;
                x = point(t);
            }
        }
        if val - before <= 1e-15 * val.abs() {
            break;
        }
    }
    (val, x)
}

/// The dual space as a normed space on the same coordinates.
pub fn dual_space(space: &NormedSpace, res: &Resolution) -> NormedSpace {
    dual_space_with(space, res, DualMode::Auto)
}

pub fn dual_space_with(space: &NormedSpace, res: &Resolution, mode: DualMode) -> NormedSpace {
    if mode == DualMode::Auto {
        if let Some(d) = space.closed_form_dual() {
            return d;
        }
    }
    let label = format!("{}*", space.label());
    let e = space.equivalence();
    let equiv = Equivalence { lower: 1.0 / e.upper, upper: 1.0 / e.lower, certified: e.certified };
    match space.dim() {
        1 => {
            let a = space.norm(&[1.0]);
            NormedSpace::builder(1, label, move |v| v[0].abs() / a)
                .equivalence(Equivalence { lower: 1.0 / a, upper: 1.0 / a, certified: true })
                .build()
        }
        2 => {
            let polys = Arc::new(ball_polygons(space, res.dual_nodes));
            let p1 = polys.clone();
            let p2 = polys;
            NormedSpace::builder(2, label, move |g| {
                let g = [g[0], g[1]];
                0.5 * (p1.inner.support(g) + p1.outer.support(g))
            })
            .dir_deriv(move |g, d| {
                let (g, d) = ([g[0], g[1]], [d[0], d[1]]);
                0.5 * (p2.inner.support_deriv(g, d) + p2.outer.support_deriv(g, d))
            })
            .equivalence(equiv)
            .build()
        }
        _ => {
            let base = space.clone();
            NormedSpace::builder(space.dim(), label, move |g| {
                if g.iter().all(|&c| c == 0.0) {
                    0.0
                } else {
                    support_nd(&base, g).0
                }
            })
            .equivalence(Equivalence { certified: false, ..equiv })
            .build()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1() -> NormedSpace {
        NormedSpace::builder(2, "l1", |v| v[0].abs() + v[1].abs())
            .dir_deriv(|x, d| {
                (0..2)
                    .map(|i| if x[i].abs() <= 1e-12 * (x[0].abs() + x[1].abs()) { d[i].abs() } else { x[i].signum() * d[i] })
                    .sum()
            })
            .build()
    }

    #[test]
    fn dual_norm_of_l1_is_max_norm() {
        let f = Functional::new(vec![1.0, 1.0]).unwrap();
        let e = dual_norm(&l1(), &f, &Resolution::default()).unwrap();
        assert!(e.lo <= 1.0 + 1e-15 && e.hi >= 1.0 - 1e-15);
        assert!(e.width() < 1e-3);
        let f = Functional::new(vec![0.3, -0.7]).unwrap();
        let e = dual_norm(&l1(), &f, &Resolution::default()).unwrap();
        assert!(e.contains(0.7, 1e-12));
    }

    #[test]
    fn zero_functional_has_zero_norm() {
        let f = Functional::zeros(2);
        let e = dual_norm(&l1(), &f, &Resolution::default()).unwrap();
        assert_eq!((e.lo, e.hi), (0.0, 0.0));
    }

    #[test]
    fn tabulated_dual_of_l1_is_max_norm() {
        let d = dual_space_with(&l1(), &Resolution::default(), DualMode::Numeric);
        for k in 0..50 {
            let t = 0.37 * k as f64;
            let g = [t.cos() * 1.3, t.sin() * 0.9];
            assert!((d.norm(&g) - g[0].abs().max(g[1].abs())).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_ascent_in_three_dimensions() {
        let l1 = NormedSpace::builder(3, "l1", |v| v.iter().map(|c| c.abs()).sum()).build();
        let (v, _) = support_nd(&l1, &[0.2, -0.9, 0.5]);
        assert!((v - 0.9).abs() < 1e-9);
    }
}
