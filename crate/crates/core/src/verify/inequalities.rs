use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{InequalityReport, Interval, PointResult, Status, ROUNDING};
use crate::classify::{flat_segments_2d, is_acs, Finding, Verdict, Witness as ClassWitness, DEFAULT_TOL};
use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::moduli::{estimate, Goal, Kind, ModulusEstimate};
use crate::normcore::{axpy, dual_space, quotient_space, smoothness_gap, NormedSpace, Vector, DEFAULT_T_SCHEDULE};
use crate::sums::{lift_witness, SumSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    DeltaRho,
    DeltaTildeRho,
    LipschitzDeltaUacs,
    DualDeltaRho,
    DualDeltaRhoBall,
    DualComposition,
    Superreflexivity,
    QuotientAcs,
    SumTheorems,
    AcsCharacterizations,
}

impl Inequality {
    pub const ALL: [Inequality; 10] = [
        Inequality::DeltaRho,
        Inequality::DeltaTildeRho,
        Inequality::LipschitzDeltaUacs,
        Inequality::DualDeltaRho,
        Inequality::DualDeltaRhoBall,
        Inequality::DualComposition,
        Inequality::Superreflexivity,
        Inequality::QuotientAcs,
        Inequality::SumTheorems,
        Inequality::AcsCharacterizations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::DeltaRho => "delta_rho",
            Inequality::DeltaTildeRho => "delta_tilde_rho",
            Inequality::LipschitzDeltaUacs => "lipschitz_delta_uacs",
            Inequality::DualDeltaRho => "dual_delta_rho",
            Inequality::DualDeltaRhoBall => "dual_delta_rho_ball",
            Inequality::DualComposition => "dual_composition",
            Inequality::Superreflexivity => "superreflexivity",
            Inequality::QuotientAcs => "quotient_acs",
            Inequality::SumTheorems => "sum_theorems",
            Inequality::AcsCharacterizations => "acs_characterizations",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Inequality::DeltaRho => "delta_uacs(eps) >= (eps*tau - 2*rho_uacs(tau)) / (2*(tau + 1))",
            Inequality::DeltaTildeRho => "2*tau < tilde_delta_uacs(eps) implies 2*rho_uacs(tau) <= tau*eps",
            Inequality::LipschitzDeltaUacs => "|delta_uacs(eps) - delta_uacs(eps')| <= |eps - eps'| / min(eps, eps') on (0, 1)",
            Inequality::DualDeltaRho => "delta_uacs(X; eps) + rho_uacs(X*; tau) >= tau*eps/2",
            Inequality::DualDeltaRhoBall => "delta_uacs(X*; eps) + tilde_rho_uacs(X; tau) >= tau*eps/2",
            Inequality::DualComposition => "delta_uacs(X; eps) >= delta_uacs(X*; delta_uacs(X*; eps))",
            Inequality::Superreflexivity => "rho_uacs(t) < t/2 for some t implies uniformly non-square",
            Inequality::QuotientAcs => "X* acs iff every quotient X/U of dimension 2 is acs",
            Inequality::SumTheorems => "acs components over an acs E give an acs sum; a degenerate component makes delta_uacs vanish",
            Inequality::AcsCharacterizations => "acs iff (||x - t y|| - 1)/t -> -1 for every flat pair",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Inequality> {
        Inequality::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown inequality `{s}`")))
    }
}

/// Memoised moduli of one space.
struct Moduli<'a> {
    space: &'a NormedSpace,
    res: &'a Resolution,
    memo: BTreeMap<(Kind, u64), ModulusEstimate>,
}

impl<'a> Moduli<'a> {
    fn new(space: &'a NormedSpace, res: &'a Resolution) -> Moduli<'a> {
        Moduli { space, res, memo: BTreeMap::new() }
    }

    fn prefetch(&mut self, wanted: &[(Kind, f64)]) -> Result<()> {
        let mut todo: Vec<(Kind, f64)> = wanted.iter().copied().filter(|(k, a)| !self.memo.contains_key(&(*k, a.to_bits()))).collect();
        todo.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        todo.dedup();
        let (space, res) = (self.space, self.res);
        let done: Vec<Result<ModulusEstimate>> =
            todo.par_iter().map(|&(k, a)| estimate(space, k, k.takes_argument().then_some(a), None, res, Goal::default())).collect();
        for ((k, a), est) in todo.into_iter().zip(done) {
            self.memo.insert((k, a.to_bits()), est?);
        }
        Ok(())
    }

    fn get(&mut self, kind: Kind, arg: f64) -> Result<&ModulusEstimate> {
        self.prefetch(&[(kind, arg)])?;
        Ok(&self.memo[&(kind, arg.to_bits())])
    }

    /// `δ_uacs(a)` for any `a >= 0`, using `δ_uacs(0) = 0` and `δ_uacs(a) = δ_uacs(2)` above 2.
    fn delta_uacs_at(&mut self, a: f64) -> Result<Interval> {
        if a <= 0.0 {
            return Ok(Interval::point(0.0));
        }
        Ok(interval(self.get(Kind::DeltaUacs, a.min(2.0))?))
    }
}

fn interval(e: &ModulusEstimate) -> Interval {
    Interval::new(e.lo, e.hi)
}

fn witness_json(e: &ModulusEstimate) -> serde_json::Value {
    serde_json::to_value(&e.witness).expect("witness serialises")
}

fn check_grid(name: &'static str, grid: &[f64], ok: impl Fn(f64) -> bool, range: &'static str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty);
    }
    match grid.iter().find(|&&v| !ok(v)) {
        Some(&v) => Err(Error::OutOfRange { name, value: v, range }),
        None => Ok(()),
    }
}

fn eps_ok(e: f64) -> bool {
    e > 0.0 && e <= 2.0
}

fn tau_ok(t: f64) -> bool {
    t > 0.0 && t.is_finite()
}

fn width_hint(p: PointResult, res: &Resolution) -> PointResult {
    if p.status != Status::Inconclusive || p.vacuous {
        return p;
    }
    let w = p.lhs.map_or(0.0, |i| i.width()) + p.rhs.map_or(0.0, |i| i.width());
    p.with_note(format!("combined enclosure width {w:.3e} exceeds the margin; raise angles above {}", res.angles))
}

/// `δ_uacs(ε) >= (ετ − 2ρ_uacs(τ)) / (2(τ+1))`.
pub fn check_delta_rho(space: &NormedSpace, eps_grid: &[f64], tau_grid: &[f64], res: &Resolution) -> Result<InequalityReport> {
    check_grid("eps", eps_grid, eps_ok, "(0, 2]")?;
    check_grid("tau", tau_grid, tau_ok, "(0, inf)")?;
    let mut m = Moduli::new(space, res);
    let wanted: Vec<_> =
        eps_grid.iter().map(|&e| (Kind::DeltaUacs, e)).chain(tau_grid.iter().map(|&t| (Kind::RhoUacs, t))).collect();
    m.prefetch(&wanted)?;
    let mut rep = InequalityReport::new(Inequality::DeltaRho, space.label(), &[("eps", eps_grid), ("tau", tau_grid)]);
    for &eps in eps_grid {
        for &tau in tau_grid {
            let rho = interval(m.get(Kind::RhoUacs, tau)?);
            let d = m.get(Kind::DeltaUacs, eps)?;
            let den = 2.0 * (tau + 1.0);
            let rhs = Interval::new((eps * tau - 2.0 * rho.hi) / den, (eps * tau - 2.0 * rho.lo) / den);
            let mut p = PointResult::compare(&[("eps", eps), ("tau", tau)], interval(d), rhs);
            if p.status == Status::Violated {
                p = p.with_witness(witness_json(d));
            }
            rep.points.push(width_hint(p, res));
        }
    }
    Ok(rep)
}

/// For each ε with `δ̃_uacs(ε) > 0`, takes `τ = 0.49·δ̃.lo` and checks
/// `τε >= 2ρ_uacs(τ)`.
pub fn check_delta_tilde_rho(space: &NormedSpace, eps_grid: &[f64], res: &Resolution) -> Result<InequalityReport> {
    check_grid("eps", eps_grid, eps_ok, "(0, 2]")?;
    let mut m = Moduli::new(space, res);
    m.prefetch(&eps_grid.iter().map(|&e| (Kind::DeltaUacsTilde, e)).collect::<Vec<_>>())?;
    let mut rep = InequalityReport::new(Inequality::DeltaTildeRho, space.label(), &[("eps", eps_grid)]);
    for &eps in eps_grid {
        let dt = m.get(Kind::DeltaUacsTilde, eps)?.lo;
        if !(dt > ROUNDING) {
            rep.points.push(PointResult::vacuous(&[("eps", eps)], format!("tilde_delta_uacs({eps}) has lower bound {dt:.3e}")));
            continue;
        }
        let tau = 0.49 * dt;
        // Refine only until the enclosure falls on one side of τε/2.
        let goal = Goal { hi_below: Some(0.5 * tau * eps), lo_above: Some(0.5 * tau * eps) };
        let rho = estimate(space, Kind::RhoUacs, Some(tau), None, res, goal)?;
        let rhs = Interval::new(2.0 * rho.lo, 2.0 * rho.hi);
        let mut p = PointResult::compare(&[("eps", eps), ("tau", tau)], Interval::point(tau * eps), rhs);
        if p.status == Status::Violated {
            p = p.with_witness(witness_json(&rho));
        }
        rep.points.push(width_hint(p, res));
    }
    rep.notes.push("tau = 0.49 * lower bound of tilde_delta_uacs(eps)".into());
    Ok(rep)
}

/// Adjacent grid points inside `(0, 1)`.
pub fn check_lipschitz_delta_uacs(space: &NormedSpace, eps_grid: &[f64], res: &Resolution) -> Result<InequalityReport> {
    check_grid("eps", eps_grid, |e| e > 0.0 && e < 1.0, "(0, 1)")?;
    let mut grid = eps_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut m = Moduli::new(space, res);
    m.prefetch(&grid.iter().map(|&e| (Kind::DeltaUacs, e)).collect::<Vec<_>>())?;
    let mut rep = InequalityReport::new(Inequality::LipschitzDeltaUacs, space.label(), &[("eps", &grid)]);
    for w in grid.windows(2) {
        let (a, b) = (interval(m.get(Kind::DeltaUacs, w[0])?), interval(m.get(Kind::DeltaUacs, w[1])?));
        let diff = Interval::new(0f64.max(a.lo - b.hi).max(b.lo - a.hi), (a.hi - b.lo).max(b.hi - a.lo));
        let bound = (w[1] - w[0]) / w[0];
        rep.points.push(width_hint(PointResult::compare(&[("eps", w[0]), ("eps_next", w[1])], Interval::point(bound), diff), res));
    }
    if grid.len() < 2 {
        rep.notes.push("fewer than two grid points: nothing to compare".into());
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualReports {
    pub dual_delta_rho: InequalityReport,
    pub dual_delta_rho_ball: InequalityReport,
    pub dual_composition: InequalityReport,
}

impl DualReports {
    pub fn into_vec(self) -> Vec<InequalityReport> {
        vec![self.dual_delta_rho, self.dual_delta_rho_ball, self.dual_composition]
    }
}

/// The two mixed inequalities between a space and its dual, and the
/// composition bound `δ_uacs^X(ε) >= δ_uacs^{X*}(δ_uacs^{X*}(ε))`.
pub fn check_dual_inequalities(space: &NormedSpace, eps_grid: &[f64], tau_grid: &[f64], res: &Resolution) -> Result<DualReports> {
    check_grid("eps", eps_grid, eps_ok, "(0, 2]")?;
    check_grid("tau", tau_grid, tau_ok, "(0, inf)")?;
    let dual = dual_space(space, res);
    let mut mx = Moduli::new(space, res);
    let mut md = Moduli::new(&dual, res);
    let eps_want = |k: Kind| eps_grid.iter().map(move |&e| (k, e));
    let tau_want = |k: Kind| tau_grid.iter().map(move |&t| (k, t));
    mx.prefetch(&eps_want(Kind::DeltaUacs).chain(tau_want(Kind::RhoUacsBall)).collect::<Vec<_>>())?;
    md.prefetch(&eps_want(Kind::DeltaUacs).chain(tau_want(Kind::RhoUacs)).collect::<Vec<_>>())?;
    let grid = [("eps", eps_grid), ("tau", tau_grid)];
    let mut first = InequalityReport::new(Inequality::DualDeltaRho, space.label(), &grid);
    let mut second = InequalityReport::new(Inequality::DualDeltaRhoBall, space.label(), &grid);
    for &eps in eps_grid {
        for &tau in tau_grid {
            let args = [("eps", eps), ("tau", tau)];
            let rhs = Interval::point(0.5 * tau * eps);
            let lhs = interval(mx.get(Kind::DeltaUacs, eps)?) + interval(md.get(Kind::RhoUacs, tau)?);
            first.points.push(width_hint(PointResult::compare(&args, lhs, rhs), res));
            let lhs = interval(md.get(Kind::DeltaUacs, eps)?) + interval(mx.get(Kind::RhoUacsBall, tau)?);
            second.points.push(width_hint(PointResult::compare(&args, lhs, rhs), res));
        }
    }
    let mut third = InequalityReport::new(Inequality::DualComposition, space.label(), &[("eps", eps_grid)]);
    for &eps in eps_grid {
        let inner = interval(md.get(Kind::DeltaUacs, eps)?);
        // δ_uacs is non-decreasing, so the outer value lies between its values at the inner endpoints.
        let rhs = Interval::new(md.delta_uacs_at(inner.lo)?.lo, md.delta_uacs_at(inner.hi)?.hi);
        let lhs = interval(mx.get(Kind::DeltaUacs, eps)?);
        third.points.push(width_hint(PointResult::compare(&[("eps", eps)], lhs, rhs), res).with_note_if_empty(format!(
            "inner delta_uacs(X*; {eps}) in [{:.6e}, {:.6e}]",
            inner.lo, inner.hi
        )));
    }
    let label = format!("dual space {}", dual.label());
    for r in [&mut first, &mut second, &mut third] {
        r.notes.push(label.clone());
    }
    Ok(DualReports { dual_delta_rho: first, dual_delta_rho_ball: second, dual_composition: third })
}

impl PointResult {
    fn with_note_if_empty(self, note: String) -> PointResult {
        if self.note.is_none() {
            self.with_note(note)
        } else {
            self
        }
    }
}

/// If some `ρ_uacs(t) < t/2` the space is uniformly non-square; conversely a
/// non-square constant of 1 forces `ρ_uacs(t) >= t/2` at every `t`.
pub fn check_superreflexivity_criterion(space: &NormedSpace, t_grid: &[f64], res: &Resolution) -> Result<InequalityReport> {
    check_grid("t", t_grid, tau_ok, "(0, inf)")?;
    let mut m = Moduli::new(space, res);
    m.prefetch(&t_grid.iter().map(|&t| (Kind::RhoUacs, t)).chain([(Kind::Nonsquareness, 0.0)]).collect::<Vec<_>>())?;
    let ns = interval(m.get(Kind::Nonsquareness, 0.0)?);
    let mut rep = InequalityReport::new(Inequality::Superreflexivity, space.label(), &[("t", t_grid)]);
    rep.notes.push(format!("non-square constant in [{:.6}, {:.6}]", ns.lo, ns.hi));
    for &t in t_grid {
        let rho = m.get(Kind::RhoUacs, t)?;
        let r = interval(rho);
        let args = [("t", t)];
        let p = if r.hi < 0.5 * t {
            // 1 > NS, compared as 1 >= NS + rounding.
            let mut p = PointResult::compare(&args, Interval::point(1.0), Interval::new(ns.lo + 2.0 * ROUNDING, ns.hi + 2.0 * ROUNDING));
            p.note = Some(format!("rho_uacs({t}) <= {:.6e} < t/2", r.hi));
            p
        } else if ns.lo >= 1.0 - DEFAULT_TOL {
            PointResult::compare(&args, r, Interval::point(0.5 * t)).with_note("non-square constant 1: contrapositive direction")
        } else {
            PointResult::vacuous(&args, format!("rho_uacs({t}) may reach t/2 and the space is uniformly non-square"))
        };
        rep.points.push(width_hint(p, res));
    }
    Ok(rep)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Complement of `k` seeded random directions, or of coordinate axes first.
fn quotient_bases(n: usize, samples: usize) -> Vec<Vec<Vector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9_0071);
    let k = n - 2;
    let mut out: Vec<Vec<Vector>> = Vec::new();
    if k == 1 {
        for i in (0..n).rev() {
            out.push(vec![Vector::unit(n, i)]);
        }
    }
    while out.len() < samples {
        let basis = (0..k).map(|_| Vector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("finite")).collect();
        out.push(basis);
    }
    out.truncate(samples);
    out
}

/// The dual is acs exactly when every two-dimensional quotient is.
pub fn check_quotient_acs(space: &NormedSpace, samples: usize, res: &Resolution) -> Result<InequalityReport> {
    let n = space.dim();
    if n < 3 {
        return Err(Error::UnsupportedDimension { expected: 3, got: n });
    }
    if samples == 0 {
        return Err(Error::Empty);
    }
    let dual = dual_space(space, res);
    let dv = is_acs(&dual, DEFAULT_TOL, res)?;
    let bases = quotient_bases(n, samples);
    let verdicts: Vec<Result<(Finding, String)>> = bases
        .par_iter()
        .map(|b| {
            let q = quotient_space(space, b, res)?;
            Ok((is_acs(&q, DEFAULT_TOL, res)?, q.label().to_string()))
        })
        .collect();
    let mut rep = InequalityReport::new(Inequality::QuotientAcs, space.label(), &[("samples", &[samples as f64])]);
    rep.notes.push(format!("dual {} acs: {} ({})", dual.label(), verdict_name(dv.verdict), dv.detail));
    let mut found_failure = false;
    for (k, (b, v)) in bases.iter().zip(verdicts).enumerate() {
        let (f, label) = v?;
        found_failure |= f.verdict == Verdict::Fails;
        let status = match (dv.verdict, f.verdict) {
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Status::Inconclusive,
            (Verdict::Holds, Verdict::Fails) => Status::Violated,
            _ => Status::Verified,
        };
        let u: Vec<Vec<f64>> = b.iter().map(|v| v.coords().to_vec()).collect();
        let mut p = PointResult::decided(&[("sample", k as f64)], status, format!("{label}: acs {} ({})", verdict_name(f.verdict), f.detail));
        p.witness = Some(serde_json::json!({ "subspace": u, "quotient_witness": f.witness }));
        rep.points.push(p);
    }
    if dv.verdict == Verdict::Fails {
        let status = if found_failure { Status::Verified } else { Status::Inconclusive };
        rep.points.push(PointResult::decided(
            &[("sample", -1.0)],
            status,
            "dual fails acs, so some quotient must fail: searched the sampled quotients",
        ));
    }
    Ok(rep)
}

/// Finite sums: acs components over an acs `E` give a uacs sum, and a
/// component with vanishing `δ_uacs` forces the same for the sum.
pub fn check_sum_theorems(sum: &SumSpace, eps_grid: &[f64], res: &Resolution) -> Result<InequalityReport> {
    check_grid("eps", eps_grid, eps_ok, "(0, 2]")?;
    let space = sum.space();
    let mut rep = InequalityReport::new(Inequality::SumTheorems, space.label(), &[("eps", eps_grid)]);
    let outer = is_acs(&sum.outer().space, DEFAULT_TOL, res)?;
    let comps: Vec<Finding> = sum.components().iter().map(|c| is_acs(c, DEFAULT_TOL, res)).collect::<Result<_>>()?;
    rep.notes.push(format!("E acs: {}", verdict_name(outer.verdict)));
    for (k, f) in comps.iter().enumerate() {
        rep.notes.push(format!("component {k} ({}) acs: {}", sum.components()[k].label(), verdict_name(f.verdict)));
    }
    let all_hold = outer.verdict == Verdict::Holds && comps.iter().all(|f| f.verdict == Verdict::Holds);
    let mut sm = Moduli::new(space, res);
    if all_hold {
        sm.prefetch(&eps_grid.iter().map(|&e| (Kind::DeltaUacs, e)).collect::<Vec<_>>())?;
        let sum_acs = is_acs(space, DEFAULT_TOL, res)?;
        let status = match sum_acs.verdict {
            Verdict::Holds => Status::Verified,
            Verdict::Fails => Status::Violated,
            Verdict::Inconclusive => Status::Inconclusive,
        };
        let mut p = PointResult::decided(&[("eps", 10.0 * DEFAULT_TOL)], status, format!("sum acs: {}", sum_acs.detail));
        p.witness = sum_acs.witness.map(|w| serde_json::to_value(w).expect("witness serialises"));
        rep.points.push(p);
        for &eps in eps_grid {
            let d = interval(sm.get(Kind::DeltaUacs, eps)?);
            // δ_uacs(sum) > 0, compared as δ.lo >= 2·rounding.
            rep.points.push(width_hint(
                PointResult::compare(&[("eps", eps)], d, Interval::point(2.0 * ROUNDING)).with_note("lower bound of delta_uacs(sum) positive"),
                res,
            ));
        }
        return Ok(rep);
    }
    let mut any = false;
    for &eps in eps_grid {
        let per: Vec<ModulusEstimate> = sum
            .components()
            .par_iter()
            .map(|c| estimate(c, Kind::DeltaUacs, Some(eps), None, res, Goal::default()))
            .collect::<Result<_>>()?;
        let (k, worst) = per.iter().enumerate().min_by(|a, b| a.1.hi.total_cmp(&b.1.hi)).expect("non-empty sum");
        if worst.hi > ROUNDING {
            continue;
        }
        any = true;
        let lifted = lift_witness(sum, k, worst)?;
        let p = PointResult::compare(&[("eps", eps)], Interval::point(0.0), Interval::new(lifted.lo, lifted.hi))
            .with_note(format!("witness of component {k} lifted into the sum"))
            .with_witness(witness_json(&lifted));
        rep.points.push(p);
    }
    if !any {
        for &eps in eps_grid {
            rep.points.push(PointResult::vacuous(&[("eps", eps)], "hypotheses of neither statement hold"));
        }
    }
    Ok(rep)
}

fn on_segment(space: &NormedSpace, a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - s) * x + s * y).collect();
    let r = space.norm(&p);
    p.iter().map(|c| c / r).collect()
}

/// `((1+t)^p + ‖x − ty‖^p − 2) / t^p` at one small `t`.
fn p_variant(space: &NormedSpace, x: &[f64], y: &[f64], p: f64) -> f64 {
    let t: f64 = if p == 1.0 { 1e-7 } else { 1e-3 };
    ((1.0 + t).powf(p) + space.norm(&axpy(-t, y, x)).powf(p) - 2.0) / t.powf(p)
}

/// Derivative characterisations of acs on flat pairs of a planar sphere.
pub fn check_acs_characterizations(space: &NormedSpace, pair_samples: usize, res: &Resolution) -> Result<InequalityReport> {
    let tol = DEFAULT_TOL;
    let mut rep = InequalityReport::new(Inequality::AcsCharacterizations, space.label(), &[("pair_samples", &[pair_samples as f64])]);
    let acs = is_acs(space, tol, res)?;
    rep.notes.push(format!("acs: {} ({})", verdict_name(acs.verdict), acs.detail));
    match acs.verdict {
        Verdict::Inconclusive => {
            rep.points.push(PointResult::decided(&[], Status::Inconclusive, "acs verdict inconclusive"));
        }
        Verdict::Fails => {
            let Some(ClassWitness::Triple { x, y, .. }) = &acs.witness else {
                return Err(Error::Infeasible("acs failure without a triple witness".into()));
            };
            let (xv, yv) = (Vector::new(x.clone())?, Vector::new(y.clone())?);
            let gap = smoothness_gap(space, &xv, &yv, &DEFAULT_T_SCHEDULE)?;
            let deriv = space.dir_deriv(x, &y.iter().map(|c| -c).collect::<Vec<_>>());
            let p = PointResult::compare(&[("pair", 0.0)], Interval::point(gap), Interval::point(tol))
                .with_note(format!("witness pair: smoothness gap {gap:.6e}, derivative of ||x - t y|| at 0+ is {deriv:.6}"))
                .with_witness(serde_json::to_value(&acs.witness).expect("witness serialises"));
            rep.points.push(p);
        }
        Verdict::Holds => {
            if space.dim() != 2 {
                rep.points.push(PointResult::vacuous(&[], "flat pairs are searched in the plane only"));
                return Ok(rep);
            }
            let flats = flat_segments_2d(space, tol, res)?;
            if flats.is_empty() {
                rep.points.push(PointResult::vacuous(&[], "no flat pairs found"));
                return Ok(rep);
            }
            let k = pair_samples.max(2);
            let mut idx = 0usize;
            for seg in &flats {
                for i in 0..k {
                    let (sa, sb) = (i as f64 / (k - 1) as f64, 1.0 - i as f64 / (k - 1) as f64);
                    if sa == sb {
                        continue;
                    }
                    let (x, y) = (on_segment(space, &seg.start, &seg.end, sa), on_segment(space, &seg.start, &seg.end, sb));
                    let gap = smoothness_gap(space, &Vector::new(x.clone())?, &Vector::new(y.clone())?, &DEFAULT_T_SCHEDULE)?;
                    let deriv = space.dir_deriv(&x, &y.iter().map(|c| -c).collect::<Vec<_>>());
                    let pv = p_variant(space, &x, &y, 1.0).abs().min(p_variant(space, &x, &y, 2.0).abs());
                    // Worst of the three quantities that must vanish.
                    let worst = gap.max((deriv + 1.0).abs()).max(pv);
                    let args = [("pair", idx as f64), ("s_x", sa), ("s_y", sb)];
                    let mut p = PointResult::compare(&args, Interval::point(tol), Interval::point(worst)).with_note(format!(
                        "gap {gap:.3e}, derivative {deriv:.9}, p-variant {pv:.3e}"
                    ));
                    if worst > 10.0 * tol {
                        p.status = Status::Violated;
                        p.witness = Some(serde_json::json!({ "x": x, "y": y }));
                    } else if p.status == Status::Violated {
                        p.status = Status::Inconclusive;
                    }
                    rep.points.push(p);
                    idx += 1;
                }
            }
        }
    }
    Ok(rep)
}
