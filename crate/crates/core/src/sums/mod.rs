//! Absolute sums `[X_1 ⊕ ... ⊕ X_m]_E` of finitely many spaces, the dual
//! norm `E′`, the pairing of component functionals, and property `(u⁺)`.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{build_absolute_custom, AbsoluteNorm};
use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::moduli::{delta_uacs, witness_value, Kind, ModulusEstimate, Witness};
use crate::normcore::plane::tangent_functionals;
use crate::normcore::{dual_norm, euclid, norming_functional_toward, support_nd, Enclosure, Equivalence, Functional, NormedSpace, Vector};
use crate::optim::golden_max;

/// An absolute sum, usable wherever a [`NormedSpace`] is expected through
/// [`SumSpace::space`].
#[derive(Clone, Debug)]
pub struct SumSpace {
    components: Vec<NormedSpace>,
    outer: AbsoluteNorm,
    offsets: Vec<usize>,
    space: NormedSpace,
}

fn split<'a>(offsets: &[usize], v: &'a [f64]) -> Vec<&'a [f64]> {
    offsets.windows(2).map(|w| &v[w[0]..w[1]]).collect()
}

pub fn build_sum(components: Vec<NormedSpace>, outer: AbsoluteNorm) -> Result<SumSpace> {
    if components.is_empty() {
        return Err(Error::Empty);
    }
    if outer.dim() != components.len() {
        return Err(Error::DimensionMismatch { expected: components.len(), got: outer.dim() });
    }
    outer.require_certified()?;
    let mut offsets = vec![0];
    for c in &components {
        offsets.push(offsets.last().unwrap() + c.dim());
    }
    let total = *offsets.last().unwrap();
    let label = format!(
        "sum(E={}; {})",
        outer.space.label(),
        components.iter().map(|c| c.label().to_string()).collect::<Vec<_>>().join(", ")
    );

    let (cs, e, off) = (components.clone(), outer.space.clone(), offsets.clone());
    let norms = move |v: &[f64]| -> Vec<f64> { split(&off, v).iter().zip(&cs).map(|(x, c)| c.norm(x)).collect() };
    let n1 = norms.clone();
    let mut b = NormedSpace::builder(total, label, move |v| e.norm(&n1(v)));

    let ce = outer.space.equivalence();
    let lower = ce.lower * components.iter().map(|c| c.equivalence().lower).fold(f64::INFINITY, f64::min);
    let upper = ce.upper * components.iter().map(|c| c.equivalence().upper).fold(0.0, f64::max);
    let certified = ce.certified && components.iter().all(|c| c.equivalence().certified);
    b = b.equivalence(Equivalence { lower, upper, certified });

    if outer.space.has_analytic_derivative() && components.iter().all(NormedSpace::has_analytic_derivative) {
        let (cs, e, off, n2) = (components.clone(), outer.space.clone(), offsets.clone(), norms.clone());
        b = b.dir_deriv(move |x, d| {
            let xs = split(&off, x);
            let ds = split(&off, d);
            let dn: Vec<f64> = cs.iter().enumerate().map(|(i, c)| c.dir_deriv(xs[i], ds[i])).collect();
            e.dir_deriv(&n2(x), &dn)
        });
    }
    let probe: Vec<f64> = vec![1.0; outer.dim()];
    if outer.space.analytic_subgrad(&probe).is_some() && components.iter().all(|c| c.analytic_subgrad(&vec![1.0; c.dim()]).is_some()) {
        let (cs, e, off, n3) = (components.clone(), outer.space.clone(), offsets.clone(), norms);
        b = b.subgrad(move |x| {
            let g = e.analytic_subgrad(&n3(x)).expect("checked");
            let mut out = Vec::with_capacity(x.len());
            for (i, (xi, c)) in split(&off, x).into_iter().zip(&cs).enumerate() {
                if xi.iter().all(|&t| t == 0.0) {
                    out.extend(std::iter::repeat(0.0).take(xi.len()));
                } else {
                    out.extend(c.analytic_subgrad(xi).expect("checked").into_iter().map(|f| g[i] * f));
                }
            }
            out
        });
    }
    Ok(SumSpace { components, outer, offsets, space: b.build() })
}

impl SumSpace {
    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn components(&self) -> &[NormedSpace] {
        &self.components
    }

    pub fn outer(&self) -> &AbsoluteNorm {
        &self.outer
    }

    pub fn total_dim(&self) -> usize {
        self.space.dim()
    }

    /// Coordinates of component `k` inside a vector of the sum.
    pub fn slot<'a>(&self, v: &'a [f64], k: usize) -> &'a [f64] {
        &v[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn component_norms(&self, v: &[f64]) -> Vec<f64> {
        split(&self.offsets, v).iter().zip(&self.components).map(|(x, c)| c.norm(x)).collect()
    }

    /// `x` placed in slot `k`, zeros elsewhere.
    pub fn embed(&self, k: usize, x: &[f64]) -> Result<Vec<f64>> {
        let c = self.components.get(k).ok_or(Error::OutOfRange { name: "slot", value: k as f64, range: "component index" })?;
        c.check_dim(x.len())?;
        let mut v = vec![0.0; self.total_dim()];
        v[self.offsets[k]..self.offsets[k + 1]].copy_from_slice(x);
        Ok(v)
    }
}

/// `sup { Σ a_i b_i : b ∈ B_E, b >= 0 }` for `a >= 0`.
fn orthant_support(e: &NormedSpace, a: &[f64]) -> f64 {
    match e.dim() {
        1 => a[0] / e.norm(&[1.0]),
        2 => {
            let f = |t: f64| {
                let u = [t.cos().max(0.0), t.sin().max(0.0)];
                (a[0] * u[0] + a[1] * u[1]) / e.norm(&u)
            };
            const COARSE: usize = 128;
            let step = FRAC_PI_2 / COARSE as f64;
            let mut best = (0.0, a[0] / e.norm(&[1.0, 0.0]));
            let top = a[1] / e.norm(&[0.0, 1.0]);
            if top > best.1 {
                best = (FRAC_PI_2, top);
            }
            for k in 1..COARSE {
                let t = step * k as f64;
                let v = f(t);
                if v > best.1 {
                    best = (t, v);
                }
            }
            let (lo, hi) = ((best.0 - step).max(0.0), (best.0 + step).min(FRAC_PI_2));
            golden_max(f, lo, hi, 80).1.max(best.1)
        }
        _ => support_nd(e, a).0,
    }
}

/// The dual of an absolute norm, `‖a‖_{E′} = sup_{b ∈ B_E} Σ |a_i b_i|`.
pub fn e_prime(outer: &AbsoluteNorm, _res: &Resolution) -> Result<AbsoluteNorm> {
    outer.require_certified()?;
    let e = outer.space.clone();
    let label = format!("{}'", outer.space.label());
    build_absolute_custom(label, outer.dim(), move |a| {
        let abs: Vec<f64> = a.iter().map(|x| x.abs()).collect();
        if abs.iter().all(|&x| x == 0.0) {
            0.0
        } else {
            orthant_support(&e, &abs)
        }
    })
}

/// The functional `S((f_i))((x_i)) = Σ f_i(x_i)` on the sum.
pub fn pair_sum_functional(sum: &SumSpace, fs: &[Functional]) -> Result<Functional> {
    if fs.len() != sum.components.len() {
        return Err(Error::DimensionMismatch { expected: sum.components.len(), got: fs.len() });
    }
    let mut out = Vec::with_capacity(sum.total_dim());
    for (f, c) in fs.iter().zip(&sum.components) {
        c.check_dim(f.dim())?;
        out.extend_from_slice(f.coords());
    }
    Functional::new(out)
}

/// `‖(‖f_i‖_*)_i‖_{E′}`, the dual norm the pairing should carry.
pub fn embedded_dual_norm(sum: &SumSpace, fs: &[Functional], res: &Resolution) -> Result<Enclosure> {
    if fs.len() != sum.components.len() {
        return Err(Error::DimensionMismatch { expected: sum.components.len(), got: fs.len() });
    }
    let ep = e_prime(&sum.outer, res)?;
    let mut lo = Vec::with_capacity(fs.len());
    let mut hi = Vec::with_capacity(fs.len());
    let mut certified = true;
    for (f, c) in fs.iter().zip(&sum.components) {
        let d = dual_norm(c, f, res)?;
        lo.push(d.lo.max(0.0));
        hi.push(d.hi.max(0.0));
        certified &= d.certified;
    }
    Ok(Enclosure { lo: ep.eval(&lo), hi: ep.eval(&hi), witness: None, certified: certified && ep.space.dim() <= 2 })
}

/// Largest `Σ |c_i||a_i − b_i|` found, with the configuration attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UPlusReport {
    pub delta: f64,
    pub eps: f64,
    pub violation: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// `violation <= eps` at the searched resolution.
    pub within_eps: bool,
    pub samples: usize,
}

fn weighted_gap(c: &[f64], a: &[f64], b: &[f64]) -> f64 {
    c.iter().zip(a.iter().zip(b)).map(|(ci, (ai, bi))| ci.abs() * (ai - bi).abs()).sum()
}

/// `sup Σ |c_i||a_i − b_i|` over `a, b ∈ S_E` with `‖a + b‖_E >= 2(1 − δ)` and
/// `c` norming `a`. By absoluteness `a` ranges over the nonnegative orthant;
/// `b` ranges over the whole sphere.
pub fn u_plus_violation(outer: &AbsoluteNorm, delta: f64, eps: f64, res: &Resolution) -> Result<UPlusReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::OutOfRange { name: "delta", value: delta, range: "(0, inf)" });
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::OutOfRange { name: "eps", value: eps, range: "(0, inf)" });
    }
    outer.require_certified()?;
    res.validate()?;
    let e = &outer.space;
    let m = e.dim();
    let floor = 2.0 * (1.0 - delta);
    let unit = |v: Vec<f64>| -> Vec<f64> {
        let n = e.norm(&v);
        v.into_iter().map(|x| x / n).collect()
    };
    let score = |a: &[f64], b: &[f64]| -> Option<(f64, Vec<f64>)> {
        let s: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        if e.norm(&s) < floor - 1e-12 {
            return None;
        }
        let w: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
        let cands: Vec<Vec<f64>> = if m == 2 {
            let (fm, fp) = tangent_functionals(e, [a[0], a[1]]);
            vec![fm.to_vec(), fp.to_vec()]
        } else {
            let neg: Vec<f64> = w.iter().map(|x| -x).collect();
            vec![norming_functional_toward(e, a, &w), norming_functional_toward(e, a, &neg)]
        };
        cands.into_iter().map(|c| (weighted_gap(&c, a, b), c)).max_by(|x, y| x.0.total_cmp(&y.0))
    };
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut samples = 0;
    let offer = |a: Vec<f64>, b: Vec<f64>, best: &mut Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)>| {
        if let Some((v, c)) = score(&a, &b) {
            if best.as_ref().map_or(true, |x| v > x.0) {
                *best = Some((v, a, b, c));
            }
        }
    };
    if m == 2 {
        let na = res.angles / 4 + 1;
        let nb = res.angles;
        for i in 0..na {
            let t = FRAC_PI_2 * i as f64 / (na - 1) as f64;
            let a = unit(vec![t.cos().max(0.0), t.sin().max(0.0)]);
            for j in 0..nb {
                let s = TAU * j as f64 / nb as f64;
                offer(a.clone(), unit(vec![s.cos(), s.sin()]), &mut best);
                samples += 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0a_b5_0u64);
        let count = res.angles * res.angles / 4;
        for k in 0..count {
            let a = unit((0..m).map(|_| rng.gen_range(0.0..1.0)).collect());
            let r = if k % 2 == 0 { rng.gen_range(0.0..1.0) * (8.0 * delta).sqrt() } else { rng.gen_range(0.0..2.0) };
            let b = unit(a.iter().map(|x| x + r * rng.gen_range(-1.0..1.0)).collect());
            offer(a, b, &mut best);
            samples += 1;
        }
        for i in 0..m {
            let mut a = vec![0.0; m];
            a[i] = 1.0;
            for j in 0..m {
                let mut b = vec![0.0; m];
                b[j] = 1.0;
                offer(a.clone(), b, &mut best);
            }
        }
    }
    let Some((mut v, mut a, mut b, mut c)) = best else {
        return Err(Error::Infeasible(format!("no pair with ||a + b|| >= {floor} on the search grid")));
    };
    // Coordinate polish on the angular parameters.
    let mut step = 0.5 * TAU / res.angles as f64;
    for _ in 0..res.polish_iters {
        let mut moved = false;
        for which in 0..2 {
            for i in 0..m {
                for s in [step, -step] {
                    let (mut a2, mut b2) = (a.clone(), b.clone());
                    if which == 0 {
                        a2[i] = (a2[i] + s).max(0.0);
                        if a2.iter().all(|&x| x == 0.0) {
                            continue;
                        }
                        a2 = unit(a2);
                    } else {
                        b2[i] += s;
                        if euclid(&b2) == 0.0 {
                            continue;
                        }
                        b2 = unit(b2);
                    }
                    if let Some((v2, c2)) = score(&a2, &b2) {
                        if v2 > v {
                            (v, a, b, c, moved) = (v2, a2, b2, c2, true);
                        }
                    }
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(UPlusReport { delta, eps, violation: v, a, b, c, within_eps: v <= eps, samples })
}

/// `inf_i δ_uacs^{X_i}(ε)` as an interval minimum of the component enclosures.
pub fn min_component_uacs(components: &[NormedSpace], eps: f64, res: &Resolution) -> Result<ModulusEstimate> {
    if components.is_empty() {
        return Err(Error::Empty);
    }
    let ests = components.iter().map(|c| delta_uacs(c, eps, res)).collect::<Result<Vec<_>>>()?;
    let k = (0..ests.len()).min_by(|&i, &j| ests[i].hi.total_cmp(&ests[j].hi)).unwrap();
    let lo = ests.iter().map(|e| e.lo).fold(f64::INFINITY, f64::min);
    let mut out = ests[k].clone();
    out.lo = lo;
    out.certified = ests.iter().all(|e| e.certified);
    out.witness = None;
    out.notes.push(format!("minimum attained by component {k} ({})", components[k].label()));
    Ok(out)
}

/// Moves a component's δ_uacs witness into slot `k` of the sum. The lifted
/// configuration has the same value, so it bounds the sum's modulus above.
pub fn lift_witness(sum: &SumSpace, k: usize, est: &ModulusEstimate) -> Result<ModulusEstimate> {
    if !matches!(est.kind, Kind::DeltaUacs) {
        return Err(Error::Config(format!("only delta_uacs witnesses lift, got {}", est.kind)));
    }
    let w = est.witness.as_ref().ok_or_else(|| Error::Config("estimate has no witness".into()))?;
    let f = w.f.as_ref().ok_or_else(|| Error::Config("witness has no functional".into()))?;
    let x = Vector::new(sum.embed(k, w.x.coords())?)?;
    let y = Vector::new(sum.embed(k, w.y.coords())?)?;
    let f = Functional::new(sum.embed(k, f.coords())?)?;
    let mut out = ModulusEstimate {
        lo: 0.0,
        hi: est.hi,
        witness: Some(Witness { x, y, f: Some(f) }),
        certified: false,
        notes: vec![format!("witness lifted from component {k}; lower bound not searched")],
        ..est.clone()
    };
    out.hi = witness_value(&sum.space, &out)?;
    Ok(out)
}
