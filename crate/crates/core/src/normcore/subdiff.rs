use serde::{Deserialize, Serialize};

use super::plane::{tangent_functionals, P2};
use super::space::NormedSpace;
use super::vector::{axpy, dot, euclid, Functional, Vector};
use crate::error::{Error, Result};

/// Norming functionals of a unit vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subdifferential {
    pub base: Vector,
    pub members: Vec<Functional>,
    pub exact: bool,
}

pub const DEFAULT_T_SCHEDULE: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

const ZERO_NORM: f64 = 1e-10;

fn nonzero(space: &NormedSpace, x: &Vector) -> Result<f64> {
    space.check_dim(x.dim())?;
    let n = space.norm(x.coords());
    if n < ZERO_NORM {
        return Err(Error::ZeroVector(n));
    }
    Ok(n)
}

fn unit(space: &NormedSpace, x: &Vector) -> Result<()> {
    let n = nonzero(space, x)?;
    if (n - 1.0).abs() > 1e-6 {
        return Err(Error::NotUnit(n));
    }
    Ok(())
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// Generic direction used to step off non-smooth points in dimension >= 3.
fn generic_direction(n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|i| ((i + 1) as f64 * 1.618_033_988_75).sin()).collect();
    let r = euclid(&v);
    v.iter().map(|c| c / r).collect()
}

/// Central-difference gradient, a norming functional wherever the norm is
/// differentiable.
fn fd_gradient(space: &NormedSpace, x: &[f64]) -> Vec<f64> {
    let h = 1e-8 * euclid(x);
    let mut g = vec![0.0; x.len()];
    let mut p = x.to_vec();
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let up = space.norm(&p);
        p[i] = x[i] - h;
        let down = space.norm(&p);
        p[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    g
}

/// Gradient at `x + ηd`, which approaches the member of the subdifferential
/// at `x` that is largest on `d`.
fn gradient_toward(space: &NormedSpace, x: &[f64], d: &[f64]) -> Vec<f64> {
    let eta = 1e-6 * euclid(x) / euclid(d).max(1e-300);
    fd_gradient(space, &axpy(eta, d, x))
}

/// A norming functional of `x`: `f(x) = ||x||`, `||f||_* = 1`.
pub fn norming_functional(space: &NormedSpace, x: &Vector) -> Result<Functional> {
    nonzero(space, x)?;
    if let Some(g) = space.analytic_subgrad(x.coords()) {
        return Functional::new(g);
    }
    if space.dim() == 2 {
        let (fm, fp) = tangent_functionals(space, [x.coords()[0], x.coords()[1]]);
        let f = if lex_less(&fp, &fm) { fp } else { fm };
        return Functional::new(f.to_vec());
    }
    if space.dim() == 1 {
        let s = x.coords()[0].signum() * space.norm(&[1.0]);
        return Functional::new(vec![s]);
    }
    Functional::new(gradient_toward(space, x.coords(), &generic_direction(space.dim())))
}

/// The norming functional of `x` that is largest on `d`.
pub fn norming_functional_toward(space: &NormedSpace, x: &[f64], d: &[f64]) -> Vec<f64> {
    match space.dim() {
        1 => vec![x[0].signum() * space.norm(&[1.0])],
        2 => {
            let (fm, fp) = tangent_functionals(space, [x[0], x[1]]);
            let pick: P2 = if fm[0] * d[0] + fm[1] * d[1] >= fp[0] * d[0] + fp[1] * d[1] { fm } else { fp };
            pick.to_vec()
        }
        _ => {
            if euclid(d) == 0.0 {
                return fd_gradient(space, x);
            }
            gradient_toward(space, x, d)
        }
    }
}

pub fn subdifferential(space: &NormedSpace, x: &Vector) -> Result<Subdifferential> {
    unit(space, x)?;
    let xs = x.coords();
    let mut members: Vec<Vec<f64>> = Vec::new();
    let exact;
    if space.dim() == 2 {
        let (fm, fp) = tangent_functionals(space, [xs[0], xs[1]]);
        members.push(fm.to_vec());
        if (fm[0] - fp[0]).abs().max((fm[1] - fp[1]).abs()) > 1e-12 {
            members.push(fp.to_vec());
        }
        exact = space.has_analytic_derivative();
    } else if space.dim() == 1 {
        members.push(vec![xs[0].signum() * space.norm(&[1.0])]);
        exact = true;
    } else {
        let n = space.dim();
        let mut candidates = Vec::new();
        if let Some(g) = space.analytic_subgrad(xs) {
            candidates.push(g);
        }
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut d = vec![0.0; n];
                d[i] = s;
                candidates.push(gradient_toward(space, xs, &d));
            }
        }
        for c in candidates {
            if members.iter().any(|m| m.iter().zip(&c).all(|(a, b)| (a - b).abs() <= 1e-6)) {
                continue;
            }
            members.push(c);
        }
        exact = false;
    }
    Ok(Subdifferential {
        base: x.clone(),
        members: members.into_iter().map(Functional::new).collect::<Result<_>>()?,
        exact,
    })
}

/// Extrapolated limit of `(||x+ty|| + ||x-ty|| - 2)/t` as `t -> 0+`.
pub fn smoothness_gap(space: &NormedSpace, x: &Vector, y: &Vector, schedule: &[f64]) -> Result<f64> {
    unit(space, x)?;
    unit(space, y)?;
    if schedule.is_empty() || schedule.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Config("t schedule must be non-empty and positive".into()));
    }
    let (xs, ys) = (x.coords(), y.coords());
    let r = dot(xs, ys) / dot(xs, xs);
    if xs.iter().zip(ys).all(|(a, b)| b - r * a == 0.0) {
        return Ok(0.0);
    }
    let q = |t: f64| (space.norm(&axpy(t, ys, xs)) + space.norm(&axpy(-t, ys, xs)) - 2.0) / t;
    let mut ts = schedule.to_vec();
    ts.sort_by(|a, b| b.total_cmp(a));
    let vals: Vec<f64> = ts.iter().map(|&t| q(t)).collect();
    let last = *vals.last().unwrap();
    if ts.len() < 2 {
        return Ok(last.max(0.0));
    }
    let (t1, t0) = (ts[ts.len() - 2], ts[ts.len() - 1]);
    let (g1, g0) = (vals[vals.len() - 2], last);
    let extrapolated = (t1 * g0 - t0 * g1) / (t1 - t0);
    Ok(extrapolated.min(last).max(0.0))
}
