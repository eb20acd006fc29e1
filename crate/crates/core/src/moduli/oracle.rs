//! Brute-force enclosures on a uniform angle grid. Every point of the
//! sphere lies within half a grid step of a node, so node values shifted by
//! the sphere's Lipschitz constant times that distance bound the modulus.
//! Norming functionals of points between two nodes lie on the dual arc
//! joining the nodes' one-sided functionals, whose length is measured from
//! the node data.

use std::f64::consts::TAU;

use super::objective::{midpoint_gap, smoothness, squareness};
use super::problems::FEAS_TOL;
use super::{GridInfo, Kind, ModulusEstimate, Witness};
use crate::error::{Error, Result};
use crate::normcore::plane::{angle_between, circle_nodes, dot2, SpherePoint, P2};
use crate::normcore::{Functional, NormedSpace, Vector};

struct Best {
    value: f64,
    at: Option<(P2, P2, Option<P2>)>,
}

impl Best {
    fn new(min: bool) -> Best {
        Best { value: if min { f64::INFINITY } else { f64::NEG_INFINITY }, at: None }
    }
}

/// Largest dual angle swept between consecutive nodes.
fn dual_gap(nodes: &[SpherePoint]) -> f64 {
    nodes.windows(2).map(|w| angle_between(w[0].fp, w[1].fm)).fold(0.0, f64::max)
}

pub fn grid_oracle_2d(space: &NormedSpace, kind: Kind, argument: f64, angle_count: usize) -> Result<ModulusEstimate> {
    if space.dim() != 2 {
        return Err(Error::UnsupportedDimension { expected: 2, got: space.dim() });
    }
    if angle_count < 8 || angle_count % 8 != 0 {
        return Err(Error::OutOfRange { name: "angle_count", value: angle_count as f64, range: "multiple of 8, >= 8" });
    }
    kind.check_argument(argument)?;
    let m = angle_count;
    let nodes = circle_nodes(space, m);
    let lip = space.sphere_lipschitz();
    let h = TAU / m as f64;
    // Norm distance from any sphere point to its nearest node.
    let near = 0.5 * lip * h;
    let dphi = lip * dual_gap(&nodes);
    let n = |v: P2| space.norm(&v);
    let add = |a: P2, b: P2| [a[0] + b[0], a[1] + b[1]];
    let sub = |a: P2, b: P2| [a[0] - b[0], a[1] - b[1]];
    let xs = &nodes[..m / 2];
    let ys = &nodes[..m];
    let min = kind.is_infimum();
    let mut bound = Best::new(min);
    let mut attained = Best::new(min);
    let consider = |b: &mut Best, v: f64, at: (P2, P2, Option<P2>)| {
        if (min && v < b.value) || (!min && v > b.value) {
            b.value = v;
            b.at = Some(at);
        }
    };
    let eps = argument;
    let tau = argument;
    match kind {
        Kind::DeltaX => {
            for x in xs {
                for y in ys {
                    let d = n(sub(x.x, y.x));
                    let v = midpoint_gap(space, &x.x, &y.x);
                    if d + 2.0 * near >= eps - FEAS_TOL {
                        consider(&mut bound, v - near, (x.x, y.x, None));
                    }
                    if d >= eps - FEAS_TOL {
                        consider(&mut attained, v, (x.x, y.x, None));
                    }
                }
            }
        }
        Kind::DeltaUacs => {
            for x in xs {
                for y in ys {
                    let (a, b) = (dot2(x.fm, y.x), dot2(x.fp, y.x));
                    let (fy, f) = if a <= b { (a, x.fm) } else { (b, x.fp) };
                    let v = midpoint_gap(space, &x.x, &y.x);
                    if fy - dphi - near <= 1.0 - eps + FEAS_TOL {
                        consider(&mut bound, v - near, (x.x, y.x, Some(f)));
                    }
                    if fy <= 1.0 - eps + FEAS_TOL {
                        consider(&mut attained, v, (x.x, y.x, Some(f)));
                    }
                }
            }
        }
        Kind::DeltaUacsTilde => {
            // Dual sphere: the segments [fm_k, fp_k] joined by short arcs.
            let duals: Vec<(P2, P2)> = nodes[..m].iter().map(|p| (p.fm, p.fp)).collect();
            let slack = 0.5 * dphi + near;
            let sup_f = |x: P2, y: P2, level: f64| -> (f64, Option<P2>) {
                let mut best = (f64::NEG_INFINITY, None);
                for &(g0, g1) in &duals {
                    let (c0, c1) = (dot2(g0, y), dot2(g1, y));
                    let mut cands: [Option<P2>; 3] = [None, None, None];
                    if c0 <= level {
                        cands[0] = Some(g0);
                    }
                    if c1 <= level {
                        cands[1] = Some(g1);
                    }
                    if (c0 - level) * (c1 - level) < 0.0 {
                        let t = (level - c0) / (c1 - c0);
                        cands[2] = Some([g0[0] + t * (g1[0] - g0[0]), g0[1] + t * (g1[1] - g0[1])]);
                    }
                    for g in cands.into_iter().flatten() {
                        let v = dot2(g, x);
                        if v > best.0 {
                            best = (v, Some(g));
                        }
                    }
                }
                best
            };
            for x in xs {
                for y in ys {
                    let mid = midpoint_gap(space, &x.x, &y.x);
                    let (relaxed, g) = sup_f(x.x, y.x, 1.0 - eps + slack);
                    consider(&mut bound, mid.max(1.0 - relaxed) - slack.max(near), (x.x, y.x, g));
                    let (exact, g) = sup_f(x.x, y.x, 1.0 - eps);
                    if g.is_some() {
                        consider(&mut attained, mid.max(1.0 - exact), (x.x, y.x, g));
                    }
                }
            }
        }
        Kind::RhoX | Kind::RhoUacs | Kind::RhoUacsBall => {
            let constrained = kind != Kind::RhoX;
            let ys: &[SpherePoint] = if constrained { ys } else { xs };
            for x in xs {
                for y in ys {
                    let v = smoothness(space, &x.x, &y.x, tau);
                    let s = if constrained { n(add(x.x, y.x)) } else { f64::INFINITY };
                    if s + 2.0 * near >= 2.0 * (1.0 - tau) - FEAS_TOL {
                        consider(&mut bound, v + (1.0 + tau) * near, (x.x, y.x, None));
                    }
                    if s >= 2.0 * (1.0 - tau) - FEAS_TOL {
                        consider(&mut attained, v, (x.x, y.x, None));
                    }
                }
            }
        }
        Kind::Nonsquareness => {
            for x in xs {
                for y in xs {
                    let v = squareness(space, &x.x, &y.x);
                    consider(&mut bound, v + near, (x.x, y.x, None));
                    consider(&mut attained, v, (x.x, y.x, None));
                }
            }
        }
        Kind::DeltaUacsed => {
            return Err(Error::Config("the grid oracle does not cover the directional modulus".into()));
        }
    }
    let (r0, r1) = kind.range(argument);
    let empty = attained.at.is_none();
    let (lo, hi) = if min {
        (bound.value.max(r0), if empty { r1 } else { attained.value.min(r1) })
    } else {
        (if empty { r0 } else { attained.value.max(r0) }, bound.value.min(r1))
    };
    let witness = attained.at.map(|(x, y, f)| Witness {
        x: Vector::new(x.to_vec()).expect("finite"),
        y: Vector::new(y.to_vec()).expect("finite"),
        f: f.map(|g| Functional::new(g.to_vec()).expect("finite")),
    });
    let uses_duals = matches!(kind, Kind::DeltaUacs | Kind::DeltaUacsTilde);
    let certified = space.equivalence().certified && (!uses_duals || space.has_analytic_derivative());
    Ok(ModulusEstimate {
        kind,
        argument: kind.takes_argument().then_some(argument),
        direction: None,
        lo: lo.min(hi),
        hi: hi.max(lo),
        witness,
        certified,
        empty,
        resolution: GridInfo { method: "grid_oracle".into(), angles: m, cells: (m / 2) * m, depth: 0, sections: 1 },
        notes: Vec::new(),
    })
}
