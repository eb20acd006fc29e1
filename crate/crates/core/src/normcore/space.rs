use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::vector::{axpy, euclid, Vector};
use crate::error::{Error, Result};

pub type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
pub type DirDerivFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
pub type SubgradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type DualFn = dyn Fn() -> NormedSpace + Send + Sync;

/// Constants with `lower * |v|_2 <= ||v|| <= upper * |v|_2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub lower: f64,
    pub upper: f64,
    pub certified: bool,
}

/// A finite-dimensional real normed space given by a black-box norm.
#[derive(Clone)]
pub struct NormedSpace {
    dim: usize,
    label: String,
    eval: Arc<EvalFn>,
    dir: Option<Arc<DirDerivFn>>,
    subgrad: Option<Arc<SubgradFn>>,
    equiv: Equivalence,
    dual: Option<Arc<DualFn>>,
}

impl fmt::Debug for NormedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormedSpace")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("equiv", &self.equiv)
            .field("analytic_derivative", &self.dir.is_some())
            .field("analytic_subgradient", &self.subgrad.is_some())
            .finish()
    }
}

pub struct SpaceBuilder {
    dim: usize,
    label: String,
    eval: Arc<EvalFn>,
    dir: Option<Arc<DirDerivFn>>,
    subgrad: Option<Arc<SubgradFn>>,
    equiv: Option<Equivalence>,
    dual: Option<Arc<DualFn>>,
}

impl SpaceBuilder {
    /// One-sided directional derivative `N'(x; d)`.
    pub fn dir_deriv(mut self, f: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.dir = Some(Arc::new(f));
        self
    }

    pub fn subgrad(mut self, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.subgrad = Some(Arc::new(f));
        self
    }

    pub fn equivalence(mut self, e: Equivalence) -> Self {
        self.equiv = Some(e);
        self
    }

    /// Closed-form dual, used by `dual_space` in automatic mode.
    pub fn dual(mut self, f: impl Fn() -> NormedSpace + Send + Sync + 'static) -> Self {
        self.dual = Some(Arc::new(f));
        self
    }

    pub fn build(self) -> NormedSpace {
        let mut space = NormedSpace {
            dim: self.dim,
            label: self.label,
            eval: self.eval,
            dir: self.dir,
            subgrad: self.subgrad,
            equiv: Equivalence { lower: 1.0, upper: 1.0, certified: false },
            dual: self.dual,
        };
        space.equiv = match self.equiv {
            Some(e) => e,
            None => compute_equivalence(&space, DEFAULT_EQUIV_SAMPLES),
        };
        space
    }
}

pub(crate) const DEFAULT_EQUIV_SAMPLES: usize = 4096;

impl NormedSpace {
    pub fn builder(
        dim: usize,
        label: impl Into<String>,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> SpaceBuilder {
        assert!(dim >= 1, "dimension must be positive");
        SpaceBuilder {
            dim,
            label: label.into(),
            eval: Arc::new(eval),
            dir: None,
            subgrad: None,
            equiv: None,
            dual: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Unchecked evaluation for inner loops; callers guarantee the dimension.
    #[inline]
    pub fn norm(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim);
        (self.eval)(v)
    }

    pub fn norm_eval(&self, v: &Vector) -> Result<f64> {
        self.check_dim(v.dim())?;
        Ok(self.norm(v.coords()))
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got })
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.dir.is_some()
    }

    pub fn has_closed_form_dual(&self) -> bool {
        self.dual.is_some()
    }

    /// One-sided directional derivative, analytic when available.
    pub fn dir_deriv(&self, x: &[f64], d: &[f64]) -> f64 {
        match &self.dir {
            Some(f) => f(x, d),
            None => fd_dir_deriv(&*self.eval, x, d),
        }
    }

    pub fn analytic_subgrad(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.subgrad.as_ref().map(|g| g(x))
    }

    pub fn equivalence(&self) -> Equivalence {
        self.equiv
    }

    /// Bound on the norm-distance travelled per radian by the radial
    /// parametrisation of the unit sphere in the plane.
    pub fn sphere_lipschitz(&self) -> f64 {
        let (c, big) = (self.equiv.lower, self.equiv.upper);
        big / c + big * big / (c * c)
    }

    pub fn closed_form_dual(&self) -> Option<NormedSpace> {
        self.dual.as_ref().map(|f| f())
    }

    #[cfg(test)]
    pub(crate) fn eval_arc(&self) -> Arc<EvalFn> {
        self.eval.clone()
    }

    /// Sampled check of the norm axioms. Returns descriptions of violations.
    pub fn sample_axioms(&self, samples: usize, seed: u64) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        let n = self.dim;
        let e = self.equiv;
        for _ in 0..samples {
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let t: f64 = rng.gen_range(-3.0..3.0);
            let (nu, nv) = (self.norm(&u), self.norm(&v));
            let nuv = self.norm(&axpy(1.0, &u, &v));
            if nuv > (nu + nv) * (1.0 + 1e-12) {
                bad.push(format!("triangle inequality fails at {u:?}, {v:?}"));
            }
            let ntu = self.norm(&u.iter().map(|a| t * a).collect::<Vec<_>>());
            if (ntu - t.abs() * nu).abs() > 1e-12 * (t.abs() * nu).max(1e-300) {
                bad.push(format!("homogeneity fails at {u:?}, t = {t}"));
            }
            let eu = euclid(&u);
            if nu < e.lower * eu * (1.0 - 1e-9) || nu > e.upper * eu * (1.0 + 1e-9) {
                bad.push(format!("equivalence constants fail at {u:?}"));
            }
            if let Some(g) = self.analytic_subgrad(&u) {
                let fx: f64 = g.iter().zip(&u).map(|(a, b)| a * b).sum();
                if (fx - nu).abs() > 1e-9 * nu.max(1.0) {
                    bad.push(format!("subgradient does not norm {u:?}"));
                }
            }
        }
        if self.norm(&vec![0.0; n]) != 0.0 {
            bad.push("norm of zero is not zero".into());
        }
        bad
    }
}

/// Richardson-extrapolated one-sided difference quotient. Exact on
/// piecewise-linear norms away from breakpoints.
pub(crate) fn fd_dir_deriv(eval: &EvalFn, x: &[f64], d: &[f64]) -> f64 {
    let dn = euclid(d);
    if dn == 0.0 {
        return 0.0;
    }
    let nx = eval(x);
    let h = 1e-5 * euclid(x).max(1e-200) / dn;
    let q = |t: f64| (eval(&axpy(t, d, x)) - nx) / t;
    2.0 * q(0.5 * h) - q(h)
}

pub(crate) fn compute_equivalence(space: &NormedSpace, samples: usize) -> Equivalence {
    let n = space.dim;
    if n == 1 {
        let v = space.norm(&[1.0]);
        return Equivalence { lower: v, upper: v, certified: true };
    }
    if n == 2 {
        let m = samples.max(64);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for k in 0..m {
            let t = std::f64::consts::TAU * k as f64 / m as f64;
            let v = space.norm(&[t.cos(), t.sin()]);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        // Between grid directions the chord is at most h/2, and the norm is
        // upper-Lipschitz with respect to the Euclidean distance.
        let half_gap = std::f64::consts::PI / m as f64;
        let upper = hi / (1.0 - half_gap);
        let lower = lo - upper * half_gap;
        return Equivalence { lower, upper, certified: lower > 0.0 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6571_7569_76);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e);
    }
    dirs.push(vec![1.0 / (n as f64).sqrt(); n]);
    for i in 0..n {
        for j in (i + 1)..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = std::f64::consts::FRAC_1_SQRT_2;
                e[j] = s * std::f64::consts::FRAC_1_SQRT_2;
                dirs.push(e);
            }
        }
        if dirs.len() > 4 * samples {
            break;
        }
    }
    for _ in 0..samples {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = euclid(&v);
        if r > 1e-3 {
            dirs.push(v.iter().map(|a| a / r).collect());
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for d in &dirs {
        let v = space.norm(d);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Equivalence { lower: lo * 0.98, upper: hi * 1.02, certified: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1() -> NormedSpace {
        NormedSpace::builder(2, "l1", |v| v[0].abs() + v[1].abs()).build()
    }

    #[test]
    fn finite_differences_match_one_sided_derivatives() {
        let s = l1();
        let d = s.dir_deriv(&[1.0, 0.0], &[0.0, 1.0]);
        assert!((d - 1.0).abs() < 1e-9);
        let d = s.dir_deriv(&[1.0, 0.0], &[0.0, -1.0]);
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn certified_equivalence_in_the_plane_brackets_extremes() {
        let e = l1().equivalence();
        assert!(e.certified);
        assert!(e.lower <= 1.0 && e.lower > 0.998);
        assert!(e.upper >= 2f64.sqrt() && e.upper < 2f64.sqrt() + 2e-3);
    }

    #[test]
    fn axioms_hold_for_a_simple_norm() {
        assert!(l1().sample_axioms(200, 1).is_empty());
    }
}
