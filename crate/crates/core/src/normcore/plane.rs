//! Planar boundary geometry shared by the dual-norm tables and the modulus
//! search: unit-sphere points with their one-sided tangent functionals,
//! triangle hulls of boundary arcs, and polygon support functions.

use std::f64::consts::TAU;

use super::space::NormedSpace;

pub(crate) type P2 = [f64; 2];

#[inline]
pub(crate) fn dot2(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn cross2(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn sub2(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn axpy2(t: f64, a: P2, b: P2) -> P2 {
    [t * a[0] + b[0], t * a[1] + b[1]]
}

#[inline]
pub(crate) fn neg2(a: P2) -> P2 {
    [-a[0], -a[1]]
}

#[inline]
pub(crate) fn len2(a: P2) -> f64 {
    a[0].hypot(a[1])
}

/// A point of the unit sphere with the two endpoints of its norming segment.
/// `fm` supports the boundary on the clockwise side, `fp` on the
/// counter-clockwise side; they coincide at smooth points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct SpherePoint {
    pub theta: f64,
    pub x: P2,
    pub fm: P2,
    pub fp: P2,
}

impl SpherePoint {
    pub fn antipode(&self, theta: f64) -> SpherePoint {
        SpherePoint { theta, x: neg2(self.x), fm: neg2(self.fm), fp: neg2(self.fp) }
    }
}

pub(crate) fn tangent_functionals(space: &NormedSpace, x: P2) -> (P2, P2) {
    let nx = space.norm(&x);
    let t = [-x[1], x[0]];
    let r2 = dot2(x, x);
    let dp = space.dir_deriv(&x, &t);
    let dm = space.dir_deriv(&x, &neg2(t));
    let fp = [(nx * x[0] + dp * t[0]) / r2, (nx * x[1] + dp * t[1]) / r2];
    let fm = [(nx * x[0] - dm * t[0]) / r2, (nx * x[1] - dm * t[1]) / r2];
    (fm, fp)
}

pub(crate) fn sphere_point(space: &NormedSpace, theta: f64) -> SpherePoint {
    sphere_point_dir(space, [theta.cos(), theta.sin()], theta)
}

/// Direction of grid angle `2π k / count`, exact at multiples of π/4.
pub(crate) fn grid_dir(k: u64, count: u64) -> P2 {
    let k = k % count;
    if (8 * k) % count == 0 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        return match 8 * k / count {
            0 => [1.0, 0.0],
            1 => [s, s],
            2 => [0.0, 1.0],
            3 => [-s, s],
            4 => [-1.0, 0.0],
            5 => [-s, -s],
            6 => [0.0, -1.0],
            _ => [s, -s],
        };
    }
    let t = TAU * k as f64 / count as f64;
    [t.cos(), t.sin()]
}

pub(crate) fn sphere_point_dir(space: &NormedSpace, u: P2, theta: f64) -> SpherePoint {
    let n = space.norm(&u);
    let x = [u[0] / n, u[1] / n];
    let (fm, fp) = tangent_functionals(space, x);
    SpherePoint { theta, x, fm, fp }
}

/// `m + 1` nodes at angles `2πk/m`; the second half is the exact negation of
/// the first so that antipodal pairs are bit-identical.
pub(crate) fn circle_nodes(space: &NormedSpace, m: usize) -> Vec<SpherePoint> {
    assert!(m >= 4 && m % 2 == 0);
    let half = m / 2;
    let mut nodes: Vec<SpherePoint> = (0..half)
        .map(|k| sphere_point_dir(space, grid_dir(k as u64, m as u64), TAU * k as f64 / m as f64))
        .collect();
    for k in 0..half {
        let p = nodes[k].antipode(TAU * (k + half) as f64 / m as f64);
        nodes.push(p);
    }
    let first = nodes[0];
    nodes.push(SpherePoint { theta: TAU, ..first });
    nodes
}

/// Convex hull (up to four vertices) enclosing an arc of the primal or dual
/// sphere, inflated by `pad` in the corresponding norm.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Hull {
    pub v: [P2; 4],
    pub n: usize,
    pub pad: f64,
}

impl Hull {
    #[inline]
    pub fn verts(&self) -> &[P2] {
        &self.v[..self.n]
    }

    fn of(pts: &[P2], pad: f64) -> Hull {
        let mut v = [[0.0; 2]; 4];
        v[..pts.len()].copy_from_slice(pts);
        Hull { v, n: pts.len(), pad }
    }
}

const FLAT_TOL: f64 = 1e-13;

fn in_cone(p: P2, a: P2, b: P2) -> bool {
    let d = cross2(a, b);
    if d <= 0.0 {
        return false;
    }
    let alpha = cross2(p, b) / d;
    let beta = cross2(a, p) / d;
    alpha >= -1e-10 && beta >= -1e-10 && alpha + beta >= 1.0 - 1e-10 && alpha + beta <= 1e6
}

/// Hull of the primal arc from `a` to `b` (counter-clockwise, less than π).
pub(crate) fn primal_hull(a: &SpherePoint, b: &SpherePoint, lip: f64) -> Hull {
    let (g1, g2) = (a.fp, b.fm);
    if (g1[0] - g2[0]).abs().max((g1[1] - g2[1]).abs()) <= FLAT_TOL {
        return Hull::of(&[a.x, b.x], 0.0);
    }
    let det = cross2(g1, g2);
    if det.abs() > 1e-300 {
        let apex = [(g2[1] - g1[1]) / det, (g1[0] - g2[0]) / det];
        if apex.iter().all(|c| c.is_finite()) && in_cone(apex, a.x, b.x) {
            return Hull::of(&[a.x, apex, b.x], 0.0);
        }
    }
    Hull::of(&[a.x, b.x], 0.5 * lip * (b.theta - a.theta))
}

/// Hull of all norming functionals of points on the arc from `a` to `b`.
pub(crate) fn dual_hull(a: &SpherePoint, b: &SpherePoint, lip: f64) -> Hull {
    let (g1, g2) = (a.fm, b.fp);
    if (g1[0] - g2[0]).abs().max((g1[1] - g2[1]).abs()) <= FLAT_TOL {
        return Hull::of(&[g1], 0.0);
    }
    let d = cross2(a.x, b.x);
    if d > 0.0 {
        let apex = [(b.x[1] - a.x[1]) / d, (a.x[0] - b.x[0]) / d];
        if apex.iter().all(|c| c.is_finite()) && in_cone(apex, g1, g2) {
            return Hull::of(&[g1, apex, g2], 0.0);
        }
    }
    let gap = angle_between(a.fp, b.fm);
    Hull::of(&[a.fm, a.fp, b.fm, b.fp], 0.5 * lip * gap)
}

pub(crate) fn angle_between(a: P2, b: P2) -> f64 {
    cross2(a, b).atan2(dot2(a, b)).abs()
}

/// Support function of a convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug)]
pub(crate) struct Polygon {
    verts: Vec<P2>,
    normal_angles: Vec<f64>,
}

impl Polygon {
    /// Convex hull of `points`, counter-clockwise, without collinear vertices.
    pub fn new(points: Vec<P2>) -> Polygon {
        let verts = convex_hull(points);
        let n = verts.len();
        let mut normal_angles = Vec::with_capacity(n);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..n {
            let d = sub2(verts[(i + 1) % n], verts[i]);
            let mut a = (-d[0]).atan2(d[1]);
            if prev.is_finite() {
                // Rounding can turn a nearly straight vertex slightly reflex.
                a += TAU * ((prev - a) / TAU).round();
                a = a.max(prev);
            }
            normal_angles.push(a);
            prev = a;
        }
        Polygon { verts, normal_angles }
    }

    fn locate(&self, f: P2) -> usize {
        let n = self.verts.len();
        let base = self.normal_angles[0];
        let mut phi = f[1].atan2(f[0]);
        while phi < base {
            phi += TAU;
        }
        while phi >= base + TAU {
            phi -= TAU;
        }
        let i = self.normal_angles.partition_point(|&a| a < phi);
        // Vertex i starts edge i; past the last edge the wrap vertex is 0.
        let mut best = i % n;
        let mut best_val = dot2(f, self.verts[best]);
        for off in [n - 2, n - 1, 1, 2] {
            let j = (i + off) % n;
            let v = dot2(f, self.verts[j]);
            if v > best_val {
                best = j;
                best_val = v;
            }
        }
        best
    }

    pub fn support(&self, f: P2) -> f64 {
        if f == [0.0, 0.0] {
            return 0.0;
        }
        dot2(f, self.verts[self.locate(f)])
    }

    /// One-sided derivative of the support function at `f` in direction `g`.
    pub fn support_deriv(&self, f: P2, g: P2) -> f64 {
        let n = self.verts.len();
        if f == [0.0, 0.0] {
            return self.verts.iter().map(|&v| dot2(g, v)).fold(f64::NEG_INFINITY, f64::max);
        }
        let i = self.locate(f);
        let h = dot2(f, self.verts[i]);
        let tol = 1e-12 * len2(f) * len2(self.verts[i]);
        let mut best = dot2(g, self.verts[i]);
        // Walk both ways along the exposed face, which may hold many vertices.
        for step in [1, n - 1] {
            let mut j = i;
            for _ in 1..n {
                j = (j + step) % n;
                if dot2(f, self.verts[j]) < h - tol {
                    break;
                }
                best = best.max(dot2(g, self.verts[j]));
            }
        }
        best
    }
}

fn convex_hull(mut pts: Vec<P2>) -> Vec<P2> {
    pts.retain(|p| p[0].is_finite() && p[1].is_finite());
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: P2, a: P2, b: P2| cross2(sub2(a, o), sub2(b, o));
    let mut hull: Vec<P2> = Vec::with_capacity(pts.len() + 1);
    for pass in 0..2 {
        let start = hull.len();
        let ordered: Box<dyn Iterator<Item = &P2>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in ordered {
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Inner and outer polygons of the unit ball built from `m` boundary nodes.
pub(crate) struct BallPolygons {
    pub inner: Polygon,
    pub outer: Polygon,
}

pub(crate) fn ball_polygons(space: &NormedSpace, m: usize) -> BallPolygons {
    let nodes = circle_nodes(space, m);
    let lip = space.sphere_lipschitz();
    let mut inner = Vec::with_capacity(m);
    let mut outer = Vec::with_capacity(2 * m);
    for k in 0..m {
        let (a, b) = (&nodes[k], &nodes[k + 1]);
        inner.push(a.x);
        outer.push(a.x);
        let h = primal_hull(a, b, lip);
        if h.n == 3 {
            outer.push(h.v[1]);
        } else if h.pad > 0.0 {
            // Radial push-out keeps the outer polygon outside the arc.
            let mid = sphere_point(space, 0.5 * (a.theta + b.theta)).x;
            outer.push(axpy2(1.0 + h.pad / space.equivalence().lower.max(1e-12), mid, [0.0, 0.0]));
        }
    }
    BallPolygons { inner: Polygon::new(inner), outer: Polygon::new(outer) }
}

/// Normalise an angle into `[0, 2π)`.
pub(crate) fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub(crate) fn angle_of(p: P2) -> f64 {
    wrap_angle(p[1].atan2(p[0]))
}
