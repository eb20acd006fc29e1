use std::sync::Arc;

use super::dual::Enclosure;
use super::space::NormedSpace;
use super::vector::{dot, euclid, Vector};
use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::optim::convex_min;

/// A proper subspace `U` with orthonormal bases of `U` and of its
/// Euclidean complement.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub basis: Vec<Vec<f64>>,
    pub complement: Vec<Vec<f64>>,
}

fn gram_schmidt(v: &[f64], against: &[Vec<f64>]) -> Vec<f64> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for u in against {
            let p = dot(&w, u);
            w.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
        }
    }
    w
}

impl Subspace {
    pub fn new(dim: usize, basis: &[Vector]) -> Result<Subspace> {
        if basis.is_empty() {
            return Err(Error::InvalidSubspace("empty basis".into()));
        }
        if basis.len() >= dim {
            return Err(Error::InvalidSubspace("subspace must be proper".into()));
        }
        let mut orth: Vec<Vec<f64>> = Vec::new();
        for b in basis {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: b.dim() });
            }
            let w = gram_schmidt(b.coords(), &orth);
            let r = euclid(&w);
            if r <= 1e-10 * b.euclid().max(1e-300) || r == 0.0 {
                return Err(Error::InvalidSubspace("basis vectors are linearly dependent".into()));
            }
            orth.push(w.iter().map(|c| c / r).collect());
        }
        let mut all = orth.clone();
        let mut complement = Vec::new();
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            let w = gram_schmidt(&e, &all);
            let r = euclid(&w);
            if r > 1e-6 {
                let w: Vec<f64> = w.iter().map(|c| c / r).collect();
                all.push(w.clone());
                complement.push(w);
            }
            if complement.len() + orth.len() == dim {
                break;
            }
        }
        Ok(Subspace { basis: orth, complement })
    }

    pub fn lift(&self, c: &[f64]) -> Vec<f64> {
        let n = self.basis[0].len();
        let mut x = vec![0.0; n];
        for (cj, w) in c.iter().zip(&self.complement) {
            x.iter_mut().zip(w).for_each(|(a, b)| *a += cj * b);
        }
        x
    }
}

/// `inf { ||x - u|| : u in U }`; certified when `U` is a line.
pub fn quotient_norm(space: &NormedSpace, basis: &[Vector], x: &Vector) -> Result<Enclosure> {
    space.check_dim(x.dim())?;
    let sub = Subspace::new(space.dim(), basis)?;
    Ok(quotient_norm_in(space, &sub, x.coords()))
}

pub(crate) fn quotient_norm_in(space: &NormedSpace, sub: &Subspace, x: &[f64]) -> Enclosure {
    let nx = space.norm(x);
    if nx == 0.0 {
        return Enclosure { lo: 0.0, hi: 0.0, witness: Some(Vector::zeros(x.len())), certified: true };
    }
    let bound = nx / space.equivalence().lower + euclid(x);
    let shifted = |t: &[f64]| -> Vec<f64> {
        let mut p = x.to_vec();
        for (ti, u) in t.iter().zip(&sub.basis) {
            p.iter_mut().zip(u).for_each(|(a, b)| *a -= ti * b);
        }
        p
    };
    let k = sub.basis.len();
    if k == 1 {
        let (t, v, lo) = convex_min(|t| space.norm(&shifted(&[t])), -bound, bound, 120);
        let w = Vector::new(shifted(&[t])).expect("finite");
        let best = v.min(nx);
        return Enclosure { lo: lo.max(0.0).min(best), hi: best, witness: Some(w), certified: space.equivalence().certified };
    }
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..k {
        let mut e = vec![0.0; k];
        e[i] = 1.0;
        dirs.push(e);
        for j in (i + 1)..k {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; k];
                e[i] = std::f64::consts::FRAC_1_SQRT_2;
                e[j] = s * std::f64::consts::FRAC_1_SQRT_2;
                dirs.push(e);
            }
        }
    }
    let mut t = vec![0.0; k];
    let mut val = nx;
    for _ in 0..200 {
        let before = val;
        for d in &dirs {
            let line = |s: f64| -> f64 {
                let p: Vec<f64> = t.iter().zip(d).map(|(a, b)| a + s * b).collect();
                space.norm(&shifted(&p))
            };
            let (s, v, _) = convex_min(line, -2.0 * bound, 2.0 * bound, 100);
            if v < val {
                val = v;
                t.iter_mut().zip(d).for_each(|(a, b)| *a += s * b);
            }
        }
        if before - val <= 1e-15 * before {
            break;
        }
    }
    let w = Vector::new(shifted(&t)).expect("finite");
    Enclosure { lo: val, hi: val, witness: Some(w), certified: false }
}

/// `X/U` realised on the coordinates of the Euclidean complement of `U`.
pub fn quotient_space(space: &NormedSpace, basis: &[Vector], _res: &Resolution) -> Result<NormedSpace> {
    let sub = Arc::new(Subspace::new(space.dim(), basis)?);
    let base = space.clone();
    let m = space.dim() - sub.basis.len();
    let label = format!("{}/U{}", space.label(), sub.basis.len());
    let s2 = sub.clone();
    let builder = NormedSpace::builder(m, label, move |c| {
        if c.iter().all(|&a| a == 0.0) {
            return 0.0;
        }
        quotient_norm_in(&base, &s2, &s2.lift(c)).hi
    });
    if sub.basis.len() != 1 || !space.has_analytic_derivative() {
        return Ok(builder.build());
    }
    // Marginal of a jointly convex function: the derivative at `c` along `d`
    // is the least derivative of the base norm at the residual `x - u*` over
    // directions `lift(d) - s u`.
    let base = space.clone();
    let ratio = space.equivalence().upper / space.equivalence().lower;
    Ok(builder
        .dir_deriv(move |c, d| {
            let lifted = sub.lift(d);
            let u = &sub.basis[0];
            let along = |s: f64| -> Vec<f64> { lifted.iter().zip(u).map(|(a, b)| a - s * b).collect() };
            if c.iter().all(|&a| a == 0.0) {
                return quotient_norm_in(&base, &sub, &lifted).hi;
            }
            let r = quotient_norm_in(&base, &sub, &sub.lift(c)).witness.expect("residual").into_coords();
            let bound = 4.0 * ratio * euclid(&lifted) + 1.0;
            convex_min(|s| base.dir_deriv(&r, &along(s)), -bound, bound, 120).1
        })
        .build())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn max_norm_modulo_diagonal() {
        let linf = NormedSpace::builder(2, "linf", |v| v[0].abs().max(v[1].abs())).build();
        let q = quotient_norm(&linf, &[v(&[1.0, 1.0])], &v(&[1.0, -1.0])).unwrap();
        assert!(q.contains(1.0, 1e-12));
    }

    #[test]
    fn euclid_modulo_axis_is_projection() {
        let e = NormedSpace::builder(2, "l2", |v| v[0].hypot(v[1])).build();
        let q = quotient_norm(&e, &[v(&[1.0, 0.0])], &v(&[5.0, 3.0])).unwrap();
        assert!((q.hi - 3.0).abs() < 1e-12 && q.lo <= 3.0);
        let q = quotient_norm(&e, &[v(&[1.0, 0.0])], &v(&[5.0, 0.0])).unwrap();
        assert!(q.hi < 1e-12);
    }

    #[test]
    fn dependent_or_full_basis_is_rejected() {
        assert!(Subspace::new(2, &[v(&[1.0, 1.0]), v(&[2.0, 2.0])]).is_err());
        assert!(Subspace::new(2, &[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).is_err());
    }

    #[test]
    fn l1_modulo_coordinate_axis_is_l1_plane() {
        let l1 = NormedSpace::builder(3, "l1", |v| v.iter().map(|c| c.abs()).sum()).build();
        let q = quotient_space(&l1, &[v(&[0.0, 0.0, 1.0])], &Resolution::default()).unwrap();
        assert_eq!(q.dim(), 2);
        assert!((q.norm(&[0.3, -0.4]) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn line_quotient_derivative_matches_difference_quotient() {
        let l2 = crate::catalog::build_lp(3, 2.0).unwrap();
        let q = quotient_space(&l2, &[v(&[1.0, 1.0, 0.0])], &Resolution::default()).unwrap();
        assert!(q.has_analytic_derivative());
        let (c, d) = ([0.6, -0.2], [0.3, 0.9]);
        let t = 1e-6;
        let fd = (q.norm(&[c[0] + t * d[0], c[1] + t * d[1]]) - q.norm(&c)) / t;
        assert!((q.dir_deriv(&c, &d) - fd).abs() < 1e-5);
        let l1 = crate::catalog::build_lp(3, 1.0).unwrap();
        let q = quotient_space(&l1, &[v(&[0.0, 0.0, 1.0])], &Resolution::default()).unwrap();
        assert!((q.dir_deriv(&[1.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-9);
        assert!((q.dir_deriv(&[1.0, 0.0], &[-1.0, 0.0]) + 1.0).abs() < 1e-9);
    }
}
