use super::engine::{vertex_max, ArcData, Candidate, Problem, Sense};
use super::objective::{chord_partners, midpoint_gap, smoothness, squareness, tilde_sup};
use crate::normcore::plane::{angle_of, dot2, tangent_functionals, SpherePoint, P2};
use crate::normcore::NormedSpace;

/// Feasibility slack for constraints evaluated at concrete points.
pub(crate) const FEAS_TOL: f64 = 1e-12;

fn add(a: P2, b: P2) -> P2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn axpy(t: f64, a: P2, b: P2) -> P2 {
    [t * a[0] + b[0], t * a[1] + b[1]]
}

fn cand(value: f64, x: &SpherePoint, y: &SpherePoint, f: Option<P2>) -> Candidate {
    Candidate { value, x: x.x, y: y.x, f, theta: (x.theta, y.theta) }
}

/// Member of `J(x)` (given by its endpoints) that is smallest on `y`.
fn min_on(x: &SpherePoint, y: P2) -> (f64, P2) {
    let (a, b) = (dot2(x.fm, y), dot2(x.fp, y));
    if a <= b {
        (a, x.fm)
    } else {
        (b, x.fp)
    }
}

/// Lower bound of `f(y)` over norming functionals `f` of points of arc `x`
/// and points `y` of arc `y`.
fn min_functional_on(x: &ArcData, y: &ArcData) -> f64 {
    let mut m = f64::INFINITY;
    for &g in x.dual.verts() {
        for &b in y.primal.verts() {
            m = m.min(dot2(g, b));
        }
    }
    m - y.primal.pad - x.dual.pad * y.max_norm
}

fn pads(x: &ArcData, y: &ArcData) -> f64 {
    x.primal.pad + y.primal.pad
}

pub(crate) struct DeltaConvexity<'s> {
    pub space: &'s NormedSpace,
    pub eps: f64,
}

impl Problem for DeltaConvexity<'_> {
    fn sense(&self) -> Sense {
        Sense::Min
    }

    fn bound(&self, x: &ArcData, y: &ArcData) -> Option<f64> {
        let n = |v: P2| self.space.norm(&v);
        if vertex_max(x, y, |a, b| n(sub(a, b))) + pads(x, y) < self.eps - FEAS_TOL {
            return None;
        }
        Some(1.0 - 0.5 * (vertex_max(x, y, |a, b| n(add(a, b))) + pads(x, y)))
    }

    fn value(&self, x: &SpherePoint, y: &SpherePoint) -> Option<Candidate> {
        (self.margin(x, y)? >= 0.0).then(|| cand(midpoint_gap(self.space, &x.x, &y.x), x, y, None))
    }

    fn margin(&self, x: &SpherePoint, y: &SpherePoint) -> Option<f64> {
        Some(self.space.norm(&sub(x.x, y.x)) - self.eps + FEAS_TOL)
    }

    fn range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

pub(crate) struct DeltaUacs<'s> {
    pub space: &'s NormedSpace,
    pub eps: f64,
    /// Restricts to pairs with `x - y` parallel to this direction.
    pub direction: Option<P2>,
}

impl DeltaUacs<'_> {
    fn strip_overlap(&self, z: P2, x: &ArcData, y: &ArcData) -> bool {
        let n = [-z[1], z[0]];
        let scale = (n[0].hypot(n[1])) / self.space.equivalence().lower;
        let span = |d: &ArcData| {
            let (lo, hi) = d.primal.verts().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                let s = dot2(n, *v);
                (l.min(s), h.max(s))
            });
            (lo - d.primal.pad * scale, hi + d.primal.pad * scale)
        };
        let ((a0, a1), (b0, b1)) = (span(x), span(y));
        let tol = 1e-12 * (a1.abs() + b1.abs() + 1.0);
        a0 <= b1 + tol && b0 <= a1 + tol
    }
}

impl Problem for DeltaUacs<'_> {
    fn sense(&self) -> Sense {
        Sense::Min
    }

    fn bound(&self, x: &ArcData, y: &ArcData) -> Option<f64> {
        if min_functional_on(x, y) > 1.0 - self.eps + FEAS_TOL {
            return None;
        }
        if let Some(z) = self.direction {
            if !self.strip_overlap(z, x, y) {
                return None;
            }
        }
        let n = |v: P2| self.space.norm(&v);
        Some(1.0 - 0.5 * (vertex_max(x, y, |a, b| n(add(a, b))) + pads(x, y)))
    }

    fn value(&self, x: &SpherePoint, y: &SpherePoint) -> Option<Candidate> {
        if self.direction.is_some() {
            return None;
        }
        let (fy, f) = min_on(x, y.x);
        (fy <= 1.0 - self.eps + FEAS_TOL).then(|| cand(midpoint_gap(self.space, &x.x, &y.x), x, y, Some(f)))
    }

    fn margin(&self, x: &SpherePoint, y: &SpherePoint) -> Option<f64> {
        if self.direction.is_some() {
            return None;
        }
        Some(1.0 - self.eps + FEAS_TOL - min_on(x, y.x).0)
    }

    fn probe_x(&self, x: &SpherePoint) -> Vec<Candidate> {
        let Some(z) = self.direction else { return Vec::new() };
        let mut out = Vec::new();
        for y in chord_partners(self.space, &x.x, &z) {
            let y = [y[0], y[1]];
            let (fy, f) = min_on(x, y);
            if fy <= 1.0 - self.eps + FEAS_TOL {
                out.push(Candidate {
                    value: midpoint_gap(self.space, &x.x, &y),
                    x: x.x,
                    y,
                    f: Some(f),
                    theta: (x.theta, angle_of(y)),
                });
            }
        }
        out
    }

    fn range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

pub(crate) struct DeltaTilde<'s> {
    pub space: &'s NormedSpace,
    pub eps: f64,
}

impl DeltaTilde<'_> {
    /// Upper bound of `sup { f(x) : f(y) <= 1 - ε }` over the cell.
    fn sup_bound(&self, x: &ArcData, y: &ArcData) -> f64 {
        if self.eps >= 2.0 {
            let mut m = f64::NEG_INFINITY;
            for &h in y.dual.verts() {
                for &a in x.primal.verts() {
                    m = m.max(-dot2(h, a));
                }
            }
            return m + x.primal.pad + y.dual.pad * x.max_norm;
        }
        let (_, _, lam) = tilde_sup(self.space, &x.a.x, &y.a.x, self.eps);
        let n = |v: P2| self.space.norm(&v);
        vertex_max(x, y, |a, b| n(axpy(-lam, b, a))) + lam * (1.0 - self.eps) + x.primal.pad + lam * y.primal.pad
    }
}

impl Problem for DeltaTilde<'_> {
    fn sense(&self) -> Sense {
        Sense::Min
    }

    fn bound(&self, x: &ArcData, y: &ArcData) -> Option<f64> {
        let n = |v: P2| self.space.norm(&v);
        let mid = 1.0 - 0.5 * (vertex_max(x, y, |a, b| n(add(a, b))) + pads(x, y));
        Some(mid.max(1.0 - self.sup_bound(x, y)))
    }

    fn value(&self, x: &SpherePoint, y: &SpherePoint) -> Option<Candidate> {
        let (lo, _, lam) = tilde_sup(self.space, &x.x, &y.x, self.eps);
        let v = midpoint_gap(self.space, &x.x, &y.x).max(1.0 - lo);
        let f = if lam.is_infinite() {
            let (_, h) = min_on(y, x.x);
            [-h[0], -h[1]]
        } else {
            let w = axpy(-lam, y.x, x.x);
            let (fm, fp) = tangent_functionals(self.space, w);
            if dot2(fm, y.x) <= dot2(fp, y.x) {
                fm
            } else {
                fp
            }
        };
        Some(cand(v, x, y, Some(f)))
    }

    fn range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

pub(crate) struct RhoSmoothness<'s> {
    pub space: &'s NormedSpace,
    pub tau: f64,
    /// Restrict to pairs with `||x + y|| >= 2(1 - τ)`.
    pub uacs: bool,
}

impl Problem for RhoSmoothness<'_> {
    fn sense(&self) -> Sense {
        Sense::Max
    }

    fn bound(&self, x: &ArcData, y: &ArcData) -> Option<f64> {
        let n = |v: P2| self.space.norm(&v);
        if self.uacs && vertex_max(x, y, |a, b| n(add(a, b))) + pads(x, y) < 2.0 * (1.0 - self.tau) - FEAS_TOL {
            return None;
        }
        let t = self.tau;
        let m = vertex_max(x, y, |a, b| 0.5 * (n(axpy(t, b, a)) + n(axpy(-t, b, a))));
        Some(m - 1.0 + x.primal.pad + t * y.primal.pad)
    }

    fn value(&self, x: &SpherePoint, y: &SpherePoint) -> Option<Candidate> {
        if self.uacs && self.margin(x, y)? < 0.0 {
            return None;
        }
        Some(cand(smoothness(self.space, &x.x, &y.x, self.tau), x, y, None))
    }

    fn margin(&self, x: &SpherePoint, y: &SpherePoint) -> Option<f64> {
        self.uacs.then(|| self.space.norm(&add(x.x, y.x)) - 2.0 * (1.0 - self.tau) + FEAS_TOL)
    }

    fn range(&self) -> (f64, f64) {
        (0.0, self.tau)
    }
}

pub(crate) struct NonSquareness<'s> {
    pub space: &'s NormedSpace,
}

impl Problem for NonSquareness<'_> {
    fn sense(&self) -> Sense {
        Sense::Max
    }

    fn bound(&self, x: &ArcData, y: &ArcData) -> Option<f64> {
        let n = |v: P2| self.space.norm(&v);
        let s = vertex_max(x, y, |a, b| n(add(a, b)));
        let d = vertex_max(x, y, |a, b| n(sub(a, b)));
        Some(0.5 * (s.min(d) + pads(x, y)))
    }

    fn value(&self, x: &SpherePoint, y: &SpherePoint) -> Option<Candidate> {
        Some(cand(squareness(self.space, &x.x, &y.x), x, y, None))
    }

    fn range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}
