//! Three-valued classification of a finite-dimensional space as rotund,
//! smooth and acs, together with the equality form of Lau's condition.
//!
//! A verdict `fails` always carries a witness that can be re-checked with
//! [`Witness::violation`]; `holds` needs a certified positive lower bound or,
//! for smoothness, a grid scan without corners.

mod flat;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use flat::{flat_segments_2d, FlatSegment};

use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::moduli::sections::{planes, section};
use crate::moduli::{estimate, Goal, Kind, ModulusEstimate};
use crate::normcore::plane::{circle_nodes, sphere_point, P2};
use crate::normcore::{dual_norm, norming_functional_toward, Functional, NormedSpace};

pub const DEFAULT_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// Distinct unit vectors with `‖x + y‖ ≈ 2`.
    FlatPair { x: Vec<f64>, y: Vec<f64> },
    /// Two different norming functionals of one point.
    Corner { x: Vec<f64>, f1: Vec<f64>, f2: Vec<f64> },
    /// `f` norms `x`, `‖x + y‖ ≈ 2`, yet `f(y)` stays away from 1.
    Triple { x: Vec<f64>, y: Vec<f64>, f: Vec<f64> },
    /// `f` norms `x`, `g` norms `y`, `‖x + y‖ ≈ 2` but `‖f + g‖ < 2`.
    Quadruple { x: Vec<f64>, y: Vec<f64>, f: Vec<f64>, g: Vec<f64> },
}

fn sum(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

fn apply(f: &[f64], x: &[f64]) -> f64 {
    f.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl Witness {
    /// Amount by which the witness violates the defining property, after
    /// checking its side conditions at `tol`. Errors when a side condition
    /// does not hold.
    pub fn violation(&self, space: &NormedSpace, tol: f64, res: &Resolution) -> Result<f64> {
        let unit = |v: &[f64]| -> Result<()> {
            space.check_dim(v.len())?;
            let n = space.norm(v);
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::NotUnit(n));
            }
            Ok(())
        };
        let norming = |f: &[f64], x: &[f64]| -> Result<()> {
            let fx = apply(f, x);
            let d = dual_norm(space, &Functional::new(f.to_vec())?, res)?;
            if (fx - 1.0).abs() > 1e-9 || d.lo > 1.0 + 1e-6 {
                return Err(Error::Infeasible(format!("functional is not norming: f(x) = {fx}, ||f|| >= {}", d.lo)));
            }
            Ok(())
        };
        let nearly_flat = |x: &[f64], y: &[f64]| -> Result<()> {
            let s = space.norm(&sum(x, y, 1.0));
            if s < 2.0 - tol * tol {
                return Err(Error::Infeasible(format!("||x + y|| = {s} < 2 - tol^2")));
            }
            Ok(())
        };
        match self {
            Witness::FlatPair { x, y } => {
                unit(x)?;
                unit(y)?;
                nearly_flat(x, y)?;
                Ok(space.norm(&sum(x, y, -1.0)))
            }
            Witness::Corner { x, f1, f2 } => {
                unit(x)?;
                norming(f1, x)?;
                norming(f2, x)?;
                Ok(dual_norm(space, &Functional::new(sum(f1, f2, -1.0))?, res)?.lo)
            }
            Witness::Triple { x, y, f } => {
                unit(x)?;
                unit(y)?;
                nearly_flat(x, y)?;
                norming(f, x)?;
                Ok(1.0 - apply(f, y))
            }
            Witness::Quadruple { x, y, f, g } => {
                unit(x)?;
                unit(y)?;
                nearly_flat(x, y)?;
                norming(f, x)?;
                norming(g, y)?;
                Ok(2.0 - dual_norm(space, &Functional::new(sum(f, g, 1.0))?, res)?.hi)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub detail: String,
    /// False when a `holds` verdict rests on sampled sections or points only.
    pub certified: bool,
}

impl Finding {
    fn new(verdict: Verdict, witness: Option<Witness>, detail: impl Into<String>) -> Finding {
        Finding { verdict, witness, detail: detail.into(), certified: true }
    }

    fn heuristic(verdict: Verdict, detail: impl Into<String>) -> Finding {
        Finding { verdict, witness: None, detail: detail.into(), certified: false }
    }
}

fn modulus_goal(space: &NormedSpace, kind: Kind, tol: f64, res: &Resolution) -> Result<ModulusEstimate> {
    let goal = Goal { hi_below: Some(0.5 * tol * tol), lo_above: Some(0.0) };
    estimate(space, kind, Some(10.0 * tol), None, res, goal)
}

/// `holds` from a positive lower bound; in dimension three and above the
/// bound covers the sampled sections only.
fn positive_lower_bound(est: &ModulusEstimate, tol: f64) -> Option<Finding> {
    if !(est.lo > 0.0) || est.empty {
        return None;
    }
    let detail = format!("{}({}) >= {:e}", est.kind, 10.0 * tol, est.lo);
    if est.certified {
        Some(Finding::new(Verdict::Holds, None, detail))
    } else if est.resolution.method == "sections" {
        Some(Finding::heuristic(Verdict::Holds, format!("{detail} on {} sampled sections", est.resolution.sections)))
    } else {
        None
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 0.1 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "tol", value: tol, range: "(0, 0.1)" })
    }
}

pub fn is_rotund(space: &NormedSpace, tol: f64, res: &Resolution) -> Result<Finding> {
    check_tol(tol)?;
    if space.dim() == 2 {
        let flats = flat_segments_2d(space, tol, res)?;
        if let Some(s) = flats.iter().find(|s| s.length >= 10.0 * tol) {
            return Ok(Finding::new(
                Verdict::Fails,
                Some(Witness::FlatPair { x: s.start.clone(), y: s.end.clone() }),
                format!("unit sphere contains a segment of length {:.6}", s.length),
            ));
        }
    }
    let est = modulus_goal(space, Kind::DeltaX, tol, res)?;
    if let Some(f) = positive_lower_bound(&est, tol) {
        return Ok(f);
    }
    if est.hi <= 0.5 * tol * tol {
        if let Some(w) = &est.witness {
            let detail = format!("delta_X({}) <= {:e}", 10.0 * tol, est.hi);
            if space.dim() == 2 {
                return Ok(Finding::new(Verdict::Inconclusive, None, format!("{detail}, but the sphere has no segment of length >= 10 tol")));
            }
            return Ok(Finding::new(
                Verdict::Fails,
                Some(Witness::FlatPair { x: w.x.coords().to_vec(), y: w.y.coords().to_vec() }),
                detail,
            ));
        }
    }
    Ok(Finding::new(Verdict::Inconclusive, None, format!("delta_X({}) in [{:e}, {:e}]", 10.0 * tol, est.lo, est.hi)))
}

/// Locates a corner inside the arc `[a, b]` by bisecting toward the half
/// whose end functionals differ most.
fn hidden_corner(space: &NormedSpace, mut a: f64, mut b: f64) -> (P2, P2, P2) {
    let jump = |s: f64, t: f64| {
        let (p, q) = (sphere_point(space, s), sphere_point(space, t));
        (q.fm[0] - p.fp[0]).hypot(q.fm[1] - p.fp[1])
    };
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if jump(a, m) >= jump(m, b) {
            b = m;
        } else {
            a = m;
        }
    }
    let (p, q) = (sphere_point(space, a), sphere_point(space, b));
    let x = sphere_point(space, 0.5 * (a + b)).x;
    (x, p.fp, q.fm)
}

pub fn is_smooth(space: &NormedSpace, tol: f64, res: &Resolution) -> Result<Finding> {
    check_tol(tol)?;
    let gap = |f: &[f64], g: &[f64]| -> Result<f64> { Ok(dual_norm(space, &Functional::new(sum(f, g, -1.0))?, res)?.lo) };
    if space.dim() == 2 {
        let m = res.angles.max(4096);
        let nodes = circle_nodes(space, m + m % 2);
        let mut worst = 0.0f64;
        for p in &nodes[..nodes.len() - 1] {
            if (p.fp[0] - p.fm[0]).hypot(p.fp[1] - p.fm[1]) <= 1e-3 * tol {
                continue;
            }
            let g = gap(&p.fp, &p.fm)?;
            if g > tol {
                return Ok(Finding::new(
                    Verdict::Fails,
                    Some(Witness::Corner { x: p.x.to_vec(), f1: p.fm.to_vec(), f2: p.fp.to_vec() }),
                    format!("corner with pairing gap {g:.6}"),
                ));
            }
            worst = worst.max(g);
        }
        for w in nodes.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            if (q.fm[0] - p.fp[0]).hypot(q.fm[1] - p.fp[1]) <= tol {
                continue;
            }
            let (x, f1, f2) = hidden_corner(space, p.theta, q.theta);
            let g = gap(&f1, &f2)?;
            if g > tol {
                return Ok(Finding::new(
                    Verdict::Fails,
                    Some(Witness::Corner { x: x.to_vec(), f1: f1.to_vec(), f2: f2.to_vec() }),
                    format!("corner between grid nodes with pairing gap {g:.6}"),
                ));
            }
        }
        return Ok(Finding::new(Verdict::Holds, None, format!("max pairing gap {worst:e} over {m} boundary nodes and their arcs")));
    }
    let n = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5_3007);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            if j != i {
                v[j] = 1.0;
            }
            points.push(v);
        }
    }
    points.extend((0..512).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>()));
    let mut worst = 0.0f64;
    for v in points {
        let nv = space.norm(&v);
        let x: Vec<f64> = v.iter().map(|c| c / nv).collect();
        for i in 0..n {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            let f1 = norming_functional_toward(space, &x, &d);
            let f2 = norming_functional_toward(space, &x, &d.iter().map(|c| -c).collect::<Vec<_>>());
            let g = gap(&f1, &f2)?;
            if g > tol {
                return Ok(Finding::new(
                    Verdict::Fails,
                    Some(Witness::Corner { x, f1, f2 }),
                    format!("corner with pairing gap {g:.6}"),
                ));
            }
            worst = worst.max(g);
        }
    }
    Ok(Finding::heuristic(Verdict::Holds, format!("max pairing gap {worst:e} over sampled points in dimension {n}")))
}

pub fn is_acs(space: &NormedSpace, tol: f64, res: &Resolution) -> Result<Finding> {
    check_tol(tol)?;
    let est = modulus_goal(space, Kind::DeltaUacs, tol, res)?;
    if let Some(f) = positive_lower_bound(&est, tol) {
        return Ok(f);
    }
    if est.hi <= 0.5 * tol * tol {
        if let Some(w) = &est.witness {
            if let Some(f) = &w.f {
                return Ok(Finding::new(
                    Verdict::Fails,
                    Some(Witness::Triple { x: w.x.coords().to_vec(), y: w.y.coords().to_vec(), f: f.coords().to_vec() }),
                    format!("delta_uacs({}) <= {:e}", 10.0 * tol, est.hi),
                ));
            }
        }
    }
    Ok(Finding::new(Verdict::Inconclusive, None, format!("delta_uacs({}) in [{:e}, {:e}]", 10.0 * tol, est.lo, est.hi)))
}

fn lau_on_pairs(
    space: &NormedSpace,
    pairs: &[(Vec<f64>, Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>)],
    tol: f64,
    res: &Resolution,
) -> Result<(Option<Witness>, bool)> {
    let mut unsure = false;
    for (x, y, fs, gs) in pairs {
        for f in fs {
            for g in gs {
                let d = dual_norm(space, &Functional::new(sum(f, g, 1.0))?, res)?;
                if d.hi < 2.0 - tol {
                    return Ok((Some(Witness::Quadruple { x: x.clone(), y: y.clone(), f: f.clone(), g: g.clone() }), unsure));
                }
                unsure |= d.lo < 2.0 - tol;
            }
        }
    }
    Ok((None, unsure))
}

/// Whenever `‖x + y‖ = 2`, every `f ∈ J(x)` and `g ∈ J(y)` have `‖f + g‖ = 2`.
pub fn lau_condition(space: &NormedSpace, tol: f64, res: &Resolution) -> Result<Finding> {
    check_tol(tol)?;
    if space.dim() == 2 {
        let flats = flat_segments_2d(space, tol, res)?;
        let pairs: Vec<_> = flats
            .iter()
            .map(|s| (s.start.clone(), s.end.clone(), s.start_functionals.to_vec(), s.end_functionals.to_vec()))
            .collect();
        let (w, unsure) = lau_on_pairs(space, &pairs, tol, res)?;
        return Ok(match w {
            Some(w) => Finding::new(Verdict::Fails, Some(w), "flat pair whose norming functionals sum below 2"),
            None if unsure => Finding::new(Verdict::Inconclusive, None, "some dual norm enclosures straddle 2 - tol"),
            None => Finding::new(Verdict::Holds, None, format!("checked {} flat segments", flats.len())),
        });
    }
    let mut pairs = Vec::new();
    for (k, plane) in planes(space.dim(), res.sections).iter().enumerate() {
        let sec = section(space, plane, format!("{}|plane{k}", space.label()));
        for s in flat_segments_2d(&sec, tol, res)? {
            let (x, y) = (plane.lift(&s.start), plane.lift(&s.end));
            let d = sum(&y, &x, -1.0);
            let nd: Vec<f64> = d.iter().map(|c| -c).collect();
            let fs = vec![norming_functional_toward(space, &x, &d), norming_functional_toward(space, &x, &nd)];
            let gs = vec![norming_functional_toward(space, &y, &d), norming_functional_toward(space, &y, &nd)];
            pairs.push((x, y, fs, gs));
        }
    }
    let (w, _) = lau_on_pairs(space, &pairs, tol, res)?;
    Ok(match w {
        Some(w) => Finding::new(Verdict::Fails, Some(w), "flat pair on a sampled section"),
        None => Finding::new(Verdict::Inconclusive, None, format!("no violation on {} flat pairs of sampled sections", pairs.len())),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub space: String,
    pub dim: usize,
    pub tol: f64,
    pub angles: usize,
    pub rotund: Finding,
    pub smooth: Finding,
    pub acs: Finding,
    pub lau_condition: Finding,
    /// Property (P) of an absolute norm coincides with rotundity here.
    pub property_p: Verdict,
    pub flat_segments: Option<Vec<FlatSegment>>,
    /// Classes that coincide with one of the three verdicts in finite
    /// dimension.
    pub collapse: Vec<(String, String)>,
    pub notes: Vec<String>,
}

fn collapse_table() -> Vec<(String, String)> {
    let groups: [(&str, &[&str]); 3] = [
        ("rotund", &["UR", "LUR", "WUR", "WLUR", "MLUR", "WMLUR", "P"]),
        ("smooth", &["US", "UG", "FS"]),
        ("acs", &["uacs", "luacs", "sluacs", "wuacs", "luacs+", "sluacs+", "mluacs", "msluacs"]),
    ];
    groups.iter().flat_map(|(v, cs)| cs.iter().map(move |c| (c.to_string(), v.to_string()))).collect()
}

pub fn classify(space: &NormedSpace, tol: f64, res: &Resolution) -> Result<ClassificationReport> {
    let rotund = is_rotund(space, tol, res)?;
    let smooth = is_smooth(space, tol, res)?;
    let acs = is_acs(space, tol, res)?;
    let lau = lau_condition(space, tol, res)?;
    let mut notes = Vec::new();
    if acs.verdict == Verdict::Fails && (rotund.verdict == Verdict::Holds || smooth.verdict == Verdict::Holds) {
        notes.push("inconsistent verdicts: acs fails although rotund or smooth holds".into());
    }
    Ok(ClassificationReport {
        space: space.label().to_string(),
        dim: space.dim(),
        tol,
        angles: res.angles,
        property_p: rotund.verdict,
        rotund,
        smooth,
        acs,
        lau_condition: lau,
        flat_segments: if space.dim() == 2 { Some(flat_segments_2d(space, tol, res)?) } else { None },
        collapse: collapse_table(),
        notes,
    })
}

impl ClassificationReport {
    /// Re-evaluates every failure witness; returns the verdicts whose witness
    /// does not violate its property by more than `tol`.
    pub fn recheck(&self, space: &NormedSpace, res: &Resolution) -> Vec<String> {
        let mut bad = Vec::new();
        for (name, f) in [("rotund", &self.rotund), ("smooth", &self.smooth), ("acs", &self.acs), ("lau_condition", &self.lau_condition)] {
            if f.verdict != Verdict::Fails {
                continue;
            }
            match f.witness.as_ref().map(|w| w.violation(space, self.tol, res)) {
                Some(Ok(v)) if v > self.tol => {}
                Some(Ok(v)) => bad.push(format!("{name}: witness violates by only {v:e}")),
                Some(Err(e)) => bad.push(format!("{name}: {e}")),
                None => bad.push(format!("{name}: fails without a witness")),
            }
        }
        bad
    }
}
