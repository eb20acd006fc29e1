use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normcore::NormedSpace;

type P = [f64; 2];

/// One piece of the upper half of a unit sphere, traversed clockwise from
/// `(-r, 0)` towards `(r, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Piece {
    Segment { a: P, b: P },
    /// `center + (rx cos t, ry sin t)` for `t` running from `t0` to `t1`.
    Ellipse { center: P, rx: f64, ry: f64, t0: f64, t1: f64 },
}

impl Piece {
    fn at(&self, s: f64) -> P {
        match *self {
            Piece::Segment { a, b } => [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])],
            Piece::Ellipse { center, rx, ry, t0, t1 } => {
                let t = t0 + s * (t1 - t0);
                [center[0] + rx * t.cos(), center[1] + ry * t.sin()]
            }
        }
    }

    fn tangent(&self, s: f64) -> P {
        match *self {
            Piece::Segment { a, b } => [b[0] - a[0], b[1] - a[1]],
            Piece::Ellipse { rx, ry, t0, t1, .. } => {
                let t = t0 + s * (t1 - t0);
                let k = (t1 - t0).signum();
                [-k * rx * t.sin(), k * ry * t.cos()]
            }
        }
    }

    /// Distance along the unit direction `u` to this piece's curve.
    fn reach(&self, u: P) -> f64 {
        match *self {
            Piece::Segment { a, b } => {
                let e = [b[0] - a[0], b[1] - a[1]];
                cross(a, e) / cross(u, e)
            }
            Piece::Ellipse { center, rx, ry, .. } => {
                let w = [u[0] / rx, u[1] / ry];
                let c = [center[0] / rx, center[1] / ry];
                let qa = w[0] * w[0] + w[1] * w[1];
                let qb = w[0] * c[0] + w[1] * c[1];
                let qc = c[0] * c[0] + c[1] * c[1] - 1.0;
                let disc = (qb * qb - qa * qc).max(0.0);
                let q = qb + qb.signum() * disc.sqrt();
                if q == 0.0 {
                    return (-qc / qa).sqrt();
                }
                (q / qa).max(qc / q)
            }
        }
    }

    /// Norming functional `n / (n · p)` at a point `p` of the piece.
    fn functional(&self, p: P) -> P {
        let n = match *self {
            Piece::Segment { a, b } => [-(b[1] - a[1]), b[0] - a[0]],
            Piece::Ellipse { center, rx, ry, .. } => [(p[0] - center[0]) / (rx * rx), (p[1] - center[1]) / (ry * ry)],
        };
        let s = n[0] * p[0] + n[1] * p[1];
        [n[0] / s, n[1] / s]
    }
}

fn cross(a: P, b: P) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Upper half of a centrally symmetric planar unit sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc2DSpec {
    pub name: String,
    pub pieces: Vec<Piece>,
}

impl Arc2DSpec {
    pub fn preset(name: &str) -> Result<Arc2DSpec> {
        match name {
            "ex61" => {
                let (rx, ry) = (3f64.sqrt(), 3.0);
                Ok(Arc2DSpec {
                    name: "ex61".into(),
                    pieces: vec![
                        Piece::Ellipse { center: [-1.5, -1.5], rx, ry, t0: 5.0 * PI / 6.0, t1: FRAC_PI_2 },
                        Piece::Segment { a: [-1.5, 1.5], b: [1.5, 1.5] },
                        Piece::Ellipse { center: [1.5, -1.5], rx, ry, t0: FRAC_PI_2, t1: PI / 6.0 },
                    ],
                })
            }
            "fig5" => {
                let r = 0.4;
                let h = 2.0 - r * 2f64.sqrt();
                let t = [r * std::f64::consts::FRAC_1_SQRT_2, h + r * std::f64::consts::FRAC_1_SQRT_2];
                Ok(Arc2DSpec {
                    name: "fig5".into(),
                    pieces: vec![
                        Piece::Segment { a: [-2.0, 0.0], b: [-t[0], t[1]] },
                        Piece::Ellipse { center: [0.0, h], rx: r, ry: r, t0: 3.0 * FRAC_PI_4, t1: FRAC_PI_4 },
                        Piece::Segment { a: t, b: [2.0, 0.0] },
                    ],
                })
            }
            other => Err(Error::Parse(format!("unknown arc2d preset `{other}` (expected ex61 or fig5)"))),
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["ex61", "fig5"]
    }
}

const SAMPLES: usize = 32;

struct Boundary {
    pieces: Vec<Piece>,
    /// Polar angle at the start of each piece, decreasing from π to 0.
    starts: Vec<f64>,
}

impl Boundary {
    fn new(spec: &Arc2DSpec) -> Result<Boundary> {
        let pieces = &spec.pieces;
        if pieces.is_empty() {
            return Err(Error::InvalidBoundary("no pieces".into()));
        }
        for p in pieces {
            if let Piece::Ellipse { rx, ry, .. } = p {
                if !(*rx > 0.0 && *ry > 0.0) {
                    return Err(Error::InvalidBoundary("ellipse radii must be positive".into()));
                }
            }
        }
        let first = pieces[0].at(0.0);
        let last = pieces[pieces.len() - 1].at(1.0);
        let r = -first[0];
        if !(r > 0.0) || first[1].abs() > 1e-12 * r || last[1].abs() > 1e-12 * r || !(last[0] > 0.0) {
            return Err(Error::InvalidBoundary("curve must run from (-r, 0) to (r, 0)".into()));
        }
        if (last[0] - r).abs() > 1e-12 * r {
            return Err(Error::InvalidBoundary(format!("asymmetric: endpoints -{r} and {}", last[0])));
        }
        for w in pieces.windows(2) {
            let (e, s) = (w[0].at(1.0), w[1].at(0.0));
            if (e[0] - s[0]).hypot(e[1] - s[1]) > 1e-9 * r {
                return Err(Error::InvalidBoundary(format!("pieces not connected at {e:?} / {s:?}")));
            }
        }
        let mut pts = Vec::new();
        let mut tans = Vec::new();
        for p in pieces {
            for k in 0..=SAMPLES {
                let s = k as f64 / SAMPLES as f64;
                pts.push(p.at(s));
                tans.push(p.tangent(s));
            }
        }
        if pts.iter().any(|p| p[1] < -1e-12 * r) {
            return Err(Error::InvalidBoundary("curve leaves the closed upper half-plane".into()));
        }
        for w in pts.windows(2) {
            if cross(w[0], w[1]) > 1e-12 * r * r {
                return Err(Error::InvalidBoundary("origin is not interior (curve is not clockwise star-shaped)".into()));
            }
        }
        // Clockwise turning everywhere, including across the two joints
        // with the reflected lower half.
        let mut turns: Vec<(P, P)> = tans.windows(2).map(|w| (w[0], w[1])).collect();
        let (t_first, t_last) = (tans[0], *tans.last().unwrap());
        turns.push((t_last, [-t_first[0], -t_first[1]]));
        turns.push(([-t_last[0], -t_last[1]], t_first));
        for (a, b) in turns {
            let scale = a[0].hypot(a[1]) * b[0].hypot(b[1]);
            if cross(a, b) > 1e-9 * scale {
                return Err(Error::InvalidBoundary("non-convex: boundary turns counter-clockwise".into()));
            }
        }
        let mut starts: Vec<f64> = pieces.iter().map(|p| angle(p.at(0.0))).collect();
        starts[0] = PI;
        Ok(Boundary { pieces: pieces.clone(), starts })
    }

    fn piece_index(&self, phi: f64) -> usize {
        // `starts` is decreasing; the piece covering `phi` is the last one
        // that starts at or above it.
        self.starts.iter().rposition(|&s| s >= phi).unwrap_or(0)
    }

    fn upper(v: &[f64]) -> (P, f64) {
        if v[1] < 0.0 || (v[1] == 0.0 && v[0] < 0.0) {
            ([-v[0], -v[1]], -1.0)
        } else {
            ([v[0], v[1]], 1.0)
        }
    }

    fn norm(&self, v: &[f64]) -> f64 {
        let (w, _) = Self::upper(v);
        let len = w[0].hypot(w[1]);
        if len == 0.0 {
            return 0.0;
        }
        let phi = angle(w);
        let piece = &self.pieces[self.piece_index(phi)];
        len / piece.reach([w[0] / len, w[1] / len])
    }

    /// Norming functionals at `v`: one at a smooth point, two at a joint.
    fn functionals(&self, v: &[f64]) -> Vec<P> {
        let (w, sign) = Self::upper(v);
        let n = self.norm(&w);
        let p = [w[0] / n, w[1] / n];
        let phi = angle(w);
        const TOL: f64 = 1e-12;
        let mut out = Vec::with_capacity(2);
        let i = self.piece_index(phi);
        out.push(self.pieces[i].functional(p));
        if i > 0 && (self.starts[i] - phi).abs() <= TOL {
            out.push(self.pieces[i - 1].functional(p));
        }
        if i + 1 < self.pieces.len() && (phi - self.starts[i + 1]).abs() <= TOL {
            out.push(self.pieces[i + 1].functional(p));
        }
        let np = [-p[0], -p[1]];
        if phi <= TOL {
            let f = self.pieces[0].functional(np);
            out.push([-f[0], -f[1]]);
        }
        if phi >= PI - TOL {
            let f = self.pieces[self.pieces.len() - 1].functional(np);
            out.push([-f[0], -f[1]]);
        }
        out.into_iter().map(|f| [sign * f[0], sign * f[1]]).collect()
    }
}

fn angle(p: P) -> f64 {
    let a = p[1].atan2(p[0]);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Minkowski functional of the symmetric body bounded by `spec`.
pub fn build_arc2d(spec: &Arc2DSpec) -> Result<NormedSpace> {
    let b = Arc::new(Boundary::new(spec)?);
    let (b1, b2) = (b.clone(), b);
    Ok(NormedSpace::builder(2, format!("arc2d({})", spec.name), move |v| b1.norm(v))
        .dir_deriv(move |x, d| {
            if x[0] == 0.0 && x[1] == 0.0 {
                return b2.norm(d);
            }
            b2.functionals(x)
                .iter()
                .map(|f| f[0] * d[0] + f[1] * d[1])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normcore::{subdifferential, Vector};

    fn preset(name: &str) -> NormedSpace {
        build_arc2d(&Arc2DSpec::preset(name).unwrap()).unwrap()
    }

    #[test]
    fn boundary_points_have_unit_norm() {
        for name in Arc2DSpec::preset_names() {
            let spec = Arc2DSpec::preset(name).unwrap();
            let s = build_arc2d(&spec).unwrap();
            for piece in &spec.pieces {
                for k in 0..=20 {
                    let p = piece.at(k as f64 / 20.0);
                    assert!((s.norm(&p) - 1.0).abs() < 1e-10, "{name} {p:?}");
                    assert!((s.norm(&[-p[0], -p[1]]) - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn ex61_flat_top() {
        let s = preset("ex61");
        assert_eq!(s.norm(&[0.0, 1.5]), 1.0);
        assert_eq!(s.norm(&[3.0, 0.0]), 1.0);
        let (p, q) = ([1.2, 1.5], [-1.2, 1.5]);
        assert!((s.norm(&[0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fig5_sharp_vertex_has_two_functionals() {
        let s = preset("fig5");
        let sd = subdifferential(&s, &Vector::new(vec![2.0, 0.0]).unwrap()).unwrap();
        assert_eq!(sd.members.len(), 2);
        let top = subdifferential(&s, &Vector::new(vec![0.0, 2.0 - 0.4 * 2f64.sqrt() + 0.4]).unwrap()).unwrap();
        assert_eq!(top.members.len(), 1);
    }

    #[test]
    fn ex61_corners_on_axis_only() {
        let s = preset("ex61");
        let sd = subdifferential(&s, &Vector::new(vec![-3.0, 0.0]).unwrap()).unwrap();
        assert_eq!(sd.members.len(), 2);
        let end = subdifferential(&s, &Vector::new(vec![1.5, 1.5]).unwrap()).unwrap();
        assert_eq!(end.members.len(), 1);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let asym = Arc2DSpec {
            name: "x".into(),
            pieces: vec![Piece::Segment { a: [-1.0, 0.0], b: [0.0, 1.0] }, Piece::Segment { a: [0.0, 1.0], b: [2.0, 0.0] }],
        };
        assert!(build_arc2d(&asym).is_err());
        let dent = Arc2DSpec {
            name: "x".into(),
            pieces: vec![
                Piece::Segment { a: [-1.0, 0.0], b: [0.0, 0.2] },
                Piece::Segment { a: [0.0, 0.2], b: [1.0, 0.0] },
            ],
        };
        assert!(build_arc2d(&dent).is_ok());
        let concave = Arc2DSpec {
            name: "x".into(),
            pieces: vec![
                Piece::Segment { a: [-1.0, 0.0], b: [-0.5, 1.0] },
                Piece::Segment { a: [-0.5, 1.0], b: [0.0, 0.3] },
                Piece::Segment { a: [0.0, 0.3], b: [0.5, 1.0] },
                Piece::Segment { a: [0.5, 1.0], b: [1.0, 0.0] },
            ],
        };
        assert!(build_arc2d(&concave).is_err());
        let disconnected = Arc2DSpec {
            name: "x".into(),
            pieces: vec![Piece::Segment { a: [-1.0, 0.0], b: [0.0, 1.0] }, Piece::Segment { a: [0.1, 1.0], b: [1.0, 0.0] }],
        };
        assert!(build_arc2d(&disconnected).is_err());
    }

    #[test]
    fn derivative_matches_differences_off_joints() {
        let s = preset("ex61");
        let x = [2.5, 0.7];
        let d = [0.3, -1.0];
        let fd = crate::normcore::fd_dir_deriv(&*s.eval_arc(), &x, &d);
        assert!((s.dir_deriv(&x, &d) - fd).abs() < 1e-7);
    }
}
