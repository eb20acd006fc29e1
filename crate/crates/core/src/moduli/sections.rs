//! Moduli of spaces of dimension three or more, taken over two-dimensional
//! sections. Each modulus depends only on the norm of `span{x, y}`, so the
//! exact value is the extremum over all planes; sampling planes gives the
//! attained side exactly and the other side heuristically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::normcore::{dot, euclid, NormedSpace};

/// Orthonormal pair spanning a plane of `R^n`.
#[derive(Clone, Debug)]
pub(crate) struct Plane {
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
}

impl Plane {
    pub fn lift(&self, c: &[f64]) -> Vec<f64> {
        self.e1.iter().zip(&self.e2).map(|(a, b)| c[0] * a + c[1] * b).collect()
    }

    fn from_pair(u: &[f64], v: &[f64]) -> Option<Plane> {
        let r = euclid(u);
        if r == 0.0 {
            return None;
        }
        let e1: Vec<f64> = u.iter().map(|c| c / r).collect();
        let p = dot(v, &e1);
        let w: Vec<f64> = v.iter().zip(&e1).map(|(a, b)| a - p * b).collect();
        let s = euclid(&w);
        if s <= 1e-9 * euclid(v).max(1e-300) {
            return None;
        }
        Some(Plane { e1, e2: w.iter().map(|c| c / s).collect() })
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Coordinate planes, the planes of coordinate diagonals, then `extra`
/// seeded random planes.
pub(crate) fn planes(n: usize, extra: usize) -> Vec<Plane> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(Plane { e1: unit(n, i), e2: unit(n, j) });
        }
    }
    let ones = vec![1.0; n];
    let mut alt: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    if n % 2 == 1 {
        alt[n - 1] = 0.0;
    }
    out.extend(Plane::from_pair(&ones, &alt));
    out.extend(random_planes(n, extra, 0x5ec7_1025, None));
    out
}

/// Planes through the direction `z`: with each coordinate axis, then
/// `extra` seeded random partners.
pub(crate) fn planes_through(z: &[f64], extra: usize) -> Vec<Plane> {
    let n = z.len();
    let mut out: Vec<Plane> = (0..n).filter_map(|i| Plane::from_pair(z, &unit(n, i))).collect();
    out.extend(random_planes(n, extra, 0x5ec7_2025, Some(z)));
    out
}

fn random_planes(n: usize, count: usize, seed: u64, through: Option<&[f64]>) -> Vec<Plane> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 100 * (count + 1) {
        tries += 1;
        let u: Vec<f64> = match through {
            Some(z) => z.to_vec(),
            None => (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        out.extend(Plane::from_pair(&u, &v));
    }
    out
}

/// The norm restricted to a plane, in the plane's orthonormal coordinates.
pub(crate) fn section(space: &NormedSpace, plane: &Plane, label: String) -> NormedSpace {
    let (p1, p2) = (plane.clone(), plane.clone());
    let (s1, s2) = (space.clone(), space.clone());
    let mut b = NormedSpace::builder(2, label, move |c| s1.norm(&p1.lift(c)));
    if space.has_analytic_derivative() {
        b = b.dir_deriv(move |x, d| s2.dir_deriv(&p2.lift(x), &p2.lift(d)));
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planes_are_orthonormal() {
        for p in planes(4, 5).iter().chain(planes_through(&[1.0, 2.0, 0.0, -1.0], 3).iter()) {
            assert!((euclid(&p.e1) - 1.0).abs() < 1e-12);
            assert!((euclid(&p.e2) - 1.0).abs() < 1e-12);
            assert!(dot(&p.e1, &p.e2).abs() < 1e-12);
        }
        assert_eq!(planes(3, 0).len(), 4);
    }
}
