//! Enclosures of the moduli of convexity and smoothness, their uacs
//! counterparts, the directional modulus and the non-squareness constant.
//!
//! In the plane every estimate comes from a branch and bound over pairs of
//! boundary arcs and is certified when the norm has an analytic directional
//! derivative and certified equivalence constants. In higher dimension the
//! estimate is the extremum over sampled two-dimensional sections.

mod engine;
mod objective;
mod oracle;
mod problems;
pub(crate) mod sections;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use engine::Goal;
pub use oracle::grid_oracle_2d;

use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::normcore::{axpy, dot, norming_functional_toward, Functional, NormedSpace, Vector};
use engine::{search, Domain, Outcome};
use objective::{midpoint_gap, smoothness, squareness, tilde_value};
use problems::{DeltaConvexity, DeltaTilde, DeltaUacs, NonSquareness, RhoSmoothness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "delta_X")]
    DeltaX,
    #[serde(rename = "rho_X")]
    RhoX,
    #[serde(rename = "delta_uacs")]
    DeltaUacs,
    #[serde(rename = "delta_uacs_tilde")]
    DeltaUacsTilde,
    #[serde(rename = "rho_uacs")]
    RhoUacs,
    #[serde(rename = "rho_uacs_ball")]
    RhoUacsBall,
    #[serde(rename = "delta_uacsed")]
    DeltaUacsed,
    #[serde(rename = "nonsquareness")]
    Nonsquareness,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::DeltaX,
        Kind::RhoX,
        Kind::DeltaUacs,
        Kind::DeltaUacsTilde,
        Kind::RhoUacs,
        Kind::RhoUacsBall,
        Kind::DeltaUacsed,
        Kind::Nonsquareness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::DeltaX => "delta_X",
            Kind::RhoX => "rho_X",
            Kind::DeltaUacs => "delta_uacs",
            Kind::DeltaUacsTilde => "delta_uacs_tilde",
            Kind::RhoUacs => "rho_uacs",
            Kind::RhoUacsBall => "rho_uacs_ball",
            Kind::DeltaUacsed => "delta_uacsed",
            Kind::Nonsquareness => "nonsquareness",
        }
    }

    /// Infimum-type moduli: `hi` is attained, `lo` is the bound.
    pub fn is_infimum(self) -> bool {
        matches!(self, Kind::DeltaX | Kind::DeltaUacs | Kind::DeltaUacsTilde | Kind::DeltaUacsed)
    }

    pub fn takes_argument(self) -> bool {
        self != Kind::Nonsquareness
    }

    pub fn check_argument(self, arg: f64) -> Result<()> {
        if !self.takes_argument() {
            return Ok(());
        }
        if self.is_infimum() {
            if !(arg > 0.0 && arg <= 2.0) {
                return Err(Error::OutOfRange { name: "eps", value: arg, range: "(0, 2]" });
            }
        } else if !(arg > 0.0 && arg.is_finite()) {
            return Err(Error::OutOfRange { name: "tau", value: arg, range: "(0, inf)" });
        }
        Ok(())
    }

    /// Interval known to contain the modulus.
    pub(crate) fn range(self, arg: f64) -> (f64, f64) {
        match self {
            Kind::RhoX | Kind::RhoUacs | Kind::RhoUacsBall => (0.0, arg),
            _ => (0.0, 1.0),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        let t = s.trim();
        Kind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(t))
            .or(match t.to_ascii_lowercase().as_str() {
                "ns" | "non_squareness" => Some(Kind::Nonsquareness),
                _ => None,
            })
            .ok_or_else(|| Error::Parse(format!("unknown modulus kind `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vector,
    pub y: Vector,
    pub f: Option<Functional>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub method: String,
    pub angles: usize,
    pub cells: usize,
    pub depth: u8,
    pub sections: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub kind: Kind,
    pub argument: Option<f64>,
    pub direction: Option<Vector>,
    pub lo: f64,
    pub hi: f64,
    pub witness: Option<Witness>,
    pub certified: bool,
    /// No feasible pair was found; `lo`/`hi` then carry the a-priori range.
    pub empty: bool,
    pub resolution: GridInfo,
    pub notes: Vec<String>,
}

impl ModulusEstimate {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.lo - slack && v <= self.hi + slack
    }

    /// Value attained by the witness: `hi` for infima, `lo` for suprema.
    pub fn attained(&self) -> f64 {
        if self.kind.is_infimum() {
            self.hi
        } else {
            self.lo
        }
    }
}

fn check_space(space: &NormedSpace, res: &Resolution) -> Result<()> {
    res.validate()?;
    if space.dim() < 2 {
        return Err(Error::UnsupportedDimension { expected: 2, got: space.dim() });
    }
    Ok(())
}

pub fn delta_convexity(space: &NormedSpace, eps: f64, res: &Resolution) -> Result<ModulusEstimate> {
    estimate(space, Kind::DeltaX, Some(eps), None, res, Goal::default())
}

pub fn rho_smoothness(space: &NormedSpace, tau: f64, res: &Resolution) -> Result<ModulusEstimate> {
    estimate(space, Kind::RhoX, Some(tau), None, res, Goal::default())
}

pub fn delta_uacs(space: &NormedSpace, eps: f64, res: &Resolution) -> Result<ModulusEstimate> {
    estimate(space, Kind::DeltaUacs, Some(eps), None, res, Goal::default())
}

pub fn delta_uacs_tilde(space: &NormedSpace, eps: f64, res: &Resolution) -> Result<ModulusEstimate> {
    estimate(space, Kind::DeltaUacsTilde, Some(eps), None, res, Goal::default())
}

pub fn rho_uacs(space: &NormedSpace, tau: f64, res: &Resolution) -> Result<ModulusEstimate> {
    estimate(space, Kind::RhoUacs, Some(tau), None, res, Goal::default())
}

pub fn rho_uacs_ball(space: &NormedSpace, tau: f64, res: &Resolution) -> Result<ModulusEstimate> {
    estimate(space, Kind::RhoUacsBall, Some(tau), None, res, Goal::default())
}

pub fn delta_uacsed(space: &NormedSpace, z: &Vector, eps: f64, res: &Resolution) -> Result<ModulusEstimate> {
    estimate(space, Kind::DeltaUacsed, Some(eps), Some(z), res, Goal::default())
}

pub fn nonsquareness(space: &NormedSpace, res: &Resolution) -> Result<ModulusEstimate> {
    estimate(space, Kind::Nonsquareness, None, None, res, Goal::default())
}

/// General entry point. `goal` lets callers stop as soon as the enclosure
/// falls on one side of a threshold.
pub fn estimate(
    space: &NormedSpace,
    kind: Kind,
    argument: Option<f64>,
    direction: Option<&Vector>,
    res: &Resolution,
    goal: Goal,
) -> Result<ModulusEstimate> {
    check_space(space, res)?;
    let arg = match (kind.takes_argument(), argument) {
        (true, Some(a)) => a,
        (true, None) => return Err(Error::Config(format!("{kind} needs an argument"))),
        (false, _) => 0.0,
    };
    kind.check_argument(arg)?;
    let z = match (kind, direction) {
        (Kind::DeltaUacsed, Some(z)) => {
            space.check_dim(z.dim())?;
            if z.is_zero() {
                return Err(Error::ZeroVector(0.0));
            }
            Some(z.coords().to_vec())
        }
        (Kind::DeltaUacsed, None) => return Err(Error::Config("delta_uacsed needs a direction".into())),
        _ => None,
    };
    let mut est = if space.dim() == 2 {
        plane_estimate(space, kind, arg, z.as_deref(), res, goal)
    } else {
        section_estimate(space, kind, arg, z.as_deref(), res, goal)?
    };
    est.direction = direction.cloned().filter(|_| kind == Kind::DeltaUacsed);
    if matches!(kind, Kind::DeltaX | Kind::RhoUacsBall) && !est.empty {
        est.notes.push(interior_check(space, &est, 2000));
    }
    Ok(est)
}

fn plane_estimate(space: &NormedSpace, kind: Kind, arg: f64, z: Option<&[f64]>, res: &Resolution, goal: Goal) -> ModulusEstimate {
    let half = Domain { x_half: true, y_half: true };
    let mixed = Domain { x_half: true, y_half: false };
    let out: Outcome = match kind {
        Kind::DeltaX => search(space, &DeltaConvexity { space, eps: arg }, mixed, res, goal),
        Kind::DeltaUacs => search(space, &DeltaUacs { space, eps: arg, direction: None }, mixed, res, goal),
        Kind::DeltaUacsed => {
            let z = z.expect("direction checked");
            search(space, &DeltaUacs { space, eps: arg, direction: Some([z[0], z[1]]) }, mixed, res, goal)
        }
        Kind::DeltaUacsTilde => search(space, &DeltaTilde { space, eps: arg }, mixed, res, goal),
        Kind::RhoX => search(space, &RhoSmoothness { space, tau: arg, uacs: false }, half, res, goal),
        Kind::RhoUacs | Kind::RhoUacsBall => search(space, &RhoSmoothness { space, tau: arg, uacs: true }, mixed, res, goal),
        Kind::Nonsquareness => search(space, &NonSquareness { space }, half, res, goal),
    };
    let mut notes = Vec::new();
    if out.exhausted {
        notes.push(format!("cell budget of {} exhausted", res.max_cells));
    }
    if out.fallback_hulls {
        notes.push("some arcs bounded by the Lipschitz fallback".into());
    }
    let empty = out.best.is_none();
    if empty {
        notes.push("no feasible pair found".into());
    }
    let witness = out.best.as_ref().map(|c| Witness {
        x: Vector::new(c.x.to_vec()).expect("finite"),
        y: Vector::new(c.y.to_vec()).expect("finite"),
        f: c.f.map(|f| Functional::new(f.to_vec()).expect("finite")),
    });
    ModulusEstimate {
        kind,
        argument: kind.takes_argument().then_some(arg),
        direction: None,
        lo: out.lo,
        hi: out.hi,
        witness,
        certified: space.equivalence().certified && space.has_analytic_derivative() && !empty,
        empty,
        resolution: GridInfo {
            method: "branch_and_bound".into(),
            angles: res.angles,
            cells: out.cells,
            depth: out.depth,
            sections: 1,
        },
        notes,
    }
}

fn section_estimate(
    space: &NormedSpace,
    kind: Kind,
    arg: f64,
    z: Option<&[f64]>,
    res: &Resolution,
    goal: Goal,
) -> Result<ModulusEstimate> {
    let planes = match z {
        Some(z) => sections::planes_through(z, res.sections),
        None => sections::planes(space.dim(), res.sections),
    };
    let min = kind.is_infimum();
    let mut best: Option<ModulusEstimate> = None;
    let (mut lo, mut hi) = if min { (f64::INFINITY, f64::INFINITY) } else { (f64::NEG_INFINITY, f64::NEG_INFINITY) };
    let mut cells = 0;
    let mut notes = Vec::new();
    for (k, plane) in planes.iter().enumerate() {
        let sec = sections::section(space, plane, format!("{}|plane{k}", space.label()));
        let zp = z.map(|z| vec![dot(z, &plane.e1), dot(z, &plane.e2)]);
        // A section only matters while it can still beat the incumbent.
        let sec_goal = match &best {
            None => goal,
            Some(_) if min => Goal { lo_above: Some(goal.lo_above.map_or(hi, |t| t.min(hi))), ..goal },
            Some(_) => Goal { hi_below: Some(goal.hi_below.map_or(lo, |t| t.max(lo))), ..goal },
        };
        let mut e = plane_estimate(&sec, kind, arg, zp.as_deref(), res, sec_goal);
        cells += e.resolution.cells;
        if e.empty {
            continue;
        }
        if let Some(w) = e.witness.take() {
            let x = plane.lift(w.x.coords());
            let y = plane.lift(w.y.coords());
            let f = match kind {
                Kind::DeltaUacs | Kind::DeltaUacsed => Some(norming_functional_toward(space, &x, &y.iter().map(|c| -c).collect::<Vec<_>>())),
                _ => None,
            };
            e.witness = Some(Witness {
                x: Vector::new(x)?,
                y: Vector::new(y)?,
                f: f.map(Functional::new).transpose()?,
            });
        }
        let attained = e.attained();
        match witness_value(space, &e) {
            Ok(v) if (v - attained).abs() <= 1e-9 => {
                let (r0, r1) = kind.range(arg);
                if min {
                    e.hi = v.clamp(r0, r1);
                } else {
                    e.lo = v.clamp(r0, r1);
                }
            }
            Ok(v) => notes.push(format!("plane {k}: lifted witness re-evaluates to {v} (section value {attained})")),
            Err(err) => notes.push(format!("plane {k}: lifted witness rejected: {err}")),
        }
        let improves = match &best {
            None => true,
            Some(b) => (min && e.attained() < b.attained()) || (!min && e.attained() > b.attained()),
        };
        if min {
            lo = lo.min(e.lo);
            hi = hi.min(e.hi);
        } else {
            lo = lo.max(e.lo);
            hi = hi.max(e.hi);
        }
        if improves {
            best = Some(e);
        }
        let done = goal.hi_below.is_some_and(|t| hi < t) || (!min && goal.lo_above.is_some_and(|t| lo > t));
        if done {
            notes.push(format!("stopped after {} of {} sections", k + 1, planes.len()));
            break;
        }
    }
    let Some(b) = best else {
        let (r0, r1) = kind.range(arg);
        return Ok(ModulusEstimate {
            kind,
            argument: kind.takes_argument().then_some(arg),
            direction: None,
            lo: r0,
            hi: r1,
            witness: None,
            certified: false,
            empty: true,
            resolution: GridInfo { method: "sections".into(), angles: res.angles, cells, depth: 0, sections: planes.len() },
            notes: vec!["no feasible pair found on any section".into()],
        });
    };
    notes.push(format!("extremum over {} sampled two-dimensional sections", planes.len()));
    Ok(ModulusEstimate {
        kind,
        argument: b.argument,
        direction: None,
        lo,
        hi,
        witness: b.witness,
        certified: false,
        empty: false,
        resolution: GridInfo { method: "sections".into(), angles: res.angles, cells, depth: b.resolution.depth, sections: planes.len() },
        notes,
    })
}

/// Sample pairs from the interior of the ball and report whether any beats
/// the sphere enclosure.
fn interior_check(space: &NormedSpace, est: &ModulusEstimate, samples: usize) -> String {
    let n = space.dim();
    let arg = est.argument.unwrap_or(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a7e_2105);
    let point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = space.norm(&v).max(1e-300);
        let s: f64 = rng.gen_range(0.0..=1.0);
        v.iter().map(|c| s * c / r).collect()
    };
    let mut beyond = 0;
    for _ in 0..samples {
        let (x, y) = (point(&mut rng), point(&mut rng));
        match est.kind {
            Kind::DeltaX => {
                if space.norm(&axpy(-1.0, &y, &x)) >= arg && midpoint_gap(space, &x, &y) < est.lo - 1e-9 {
                    beyond += 1;
                }
            }
            Kind::RhoUacsBall => {
                if space.norm(&axpy(1.0, &x, &y)) >= 2.0 * (1.0 - arg) && smoothness(space, &x, &y, arg) > est.hi + 1e-9 {
                    beyond += 1;
                }
            }
            _ => {}
        }
    }
    format!("interior sampling: {samples} ball pairs, {beyond} beyond the sphere enclosure")
}

/// Objective value of the estimate's witness, recomputed from scratch.
/// Fails if the witness is missing or infeasible.
pub fn witness_value(space: &NormedSpace, est: &ModulusEstimate) -> Result<f64> {
    let w = est.witness.as_ref().ok_or_else(|| Error::Config("estimate has no witness".into()))?;
    let (x, y) = (w.x.coords(), w.y.coords());
    space.check_dim(x.len())?;
    space.check_dim(y.len())?;
    let tol = if space.dim() == 2 { 1e-9 } else { 1e-6 };
    for (name, v) in [("x", x), ("y", y)] {
        let n = space.norm(v);
        if (n - 1.0).abs() > tol {
            return Err(Error::Infeasible(format!("witness {name} has norm {n}")));
        }
    }
    let arg = est.argument.unwrap_or(0.0);
    let infeasible = |what: String| Err(Error::Infeasible(what));
    match est.kind {
        Kind::DeltaX => {
            let d = space.norm(&axpy(-1.0, y, x));
            if d < arg - tol {
                return infeasible(format!("||x - y|| = {d} < {arg}"));
            }
            Ok(midpoint_gap(space, x, y))
        }
        Kind::DeltaUacs | Kind::DeltaUacsed => {
            let f = w.f.as_ref().ok_or_else(|| Error::Infeasible("missing functional".into()))?;
            let (fx, fy) = (f.apply(x), f.apply(y));
            if (fx - 1.0).abs() > tol {
                return infeasible(format!("f(x) = {fx} != 1"));
            }
            if fy > 1.0 - arg + tol {
                return infeasible(format!("f(y) = {fy} > 1 - eps"));
            }
            if est.kind == Kind::DeltaUacsed {
                let z = est.direction.as_ref().ok_or_else(|| Error::Infeasible("missing direction".into()))?.coords();
                let d = axpy(-1.0, y, x);
                let along = dot(&d, z) / dot(z, z);
                let off: f64 = d.iter().zip(z).map(|(a, b)| (a - along * b).abs()).fold(0.0, f64::max);
                if off > tol {
                    return infeasible(format!("x - y is not parallel to z (off by {off})"));
                }
            }
            Ok(midpoint_gap(space, x, y))
        }
        Kind::DeltaUacsTilde => Ok(tilde_value(space, x, y, arg).0),
        Kind::RhoX => Ok(smoothness(space, x, y, arg)),
        Kind::RhoUacs | Kind::RhoUacsBall => {
            let s = space.norm(&axpy(1.0, x, y));
            if s < 2.0 * (1.0 - arg) - tol {
                return infeasible(format!("||x + y|| = {s} < 2(1 - tau)"));
            }
            Ok(smoothness(space, x, y, arg))
        }
        Kind::Nonsquareness => Ok(squareness(space, x, y)),
    }
}

/// Estimates over a grid of arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusCurve {
    pub kind: Kind,
    pub args: Vec<f64>,
    pub estimates: Vec<ModulusEstimate>,
}

impl ModulusCurve {
    /// Indices `i` where a δ-type curve decreases from `i` to `i + 1` by more
    /// than the enclosures and `tol` allow.
    pub fn monotonicity_violations(&self, tol: f64) -> Vec<usize> {
        self.estimates
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].hi < w[0].lo - tol)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "arg", "lo", "hi", "certified"]).expect("in-memory write");
        for e in &self.estimates {
            w.write_record([
                self.kind.name().to_string(),
                format!("{}", e.argument.unwrap_or(0.0)),
                format!("{:.17e}", e.lo),
                format!("{:.17e}", e.hi),
                e.certified.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn witnesses_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.estimates
                .iter()
                .map(|e| serde_json::json!({ "arg": e.argument, "witness": e.witness }))
                .collect(),
        )
    }
}

pub fn curve(space: &NormedSpace, kind: Kind, args: &[f64], direction: Option<&Vector>, res: &Resolution) -> Result<ModulusCurve> {
    if args.is_empty() {
        return Err(Error::Empty);
    }
    let estimates = args
        .iter()
        .map(|&a| estimate(space, kind, Some(a), direction, res, Goal::default()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModulusCurve { kind, args: args.to_vec(), estimates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_arc2d, build_example_62, build_lp, Arc2DSpec};

    fn res() -> Resolution {
        Resolution::default().with_gap(1e-4)
    }

    #[test]
    fn euclid_closed_forms() {
        let e = build_lp(2, 2.0).unwrap();
        let cases = [
            (Kind::DeltaX, Some(1.0), 1.0 - 3f64.sqrt() / 2.0),
            (Kind::DeltaUacs, Some(1.0), 1.0 - 0.5f64.sqrt()),
            (Kind::RhoX, Some(1.0), 2f64.sqrt() - 1.0),
            (Kind::RhoUacs, Some(0.5), 1.25f64.sqrt() - 1.0),
            (Kind::Nonsquareness, None, 0.5f64.sqrt()),
        ];
        for (k, a, v) in cases {
            let est = estimate(&e, k, a, None, &res(), Goal::default()).unwrap();
            assert!(est.contains(v, 1e-12), "{k}: {v} not in [{}, {}]", est.lo, est.hi);
            assert!(est.width() < 5e-3 && est.certified);
        }
    }

    #[test]
    fn polyhedral_degeneracies() {
        for p in [1.0, f64::INFINITY] {
            let s = build_lp(2, p).unwrap();
            for eps in [0.5, 1.0, 1.5] {
                let est = delta_uacs(&s, eps, &res()).unwrap();
                assert!(est.hi < 1e-9);
                assert!(witness_value(&s, &est).unwrap().abs() < 1e-9);
            }
            assert!(delta_convexity(&s, 1.0, &res()).unwrap().hi < 1e-9);
            assert!((rho_smoothness(&s, 0.5, &res()).unwrap().lo - 0.5).abs() < 1e-9);
            assert!((nonsquareness(&s, &res()).unwrap().lo - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn witnesses_reproduce_values() {
        let spaces = [
            build_lp(2, 3.0).unwrap(),
            build_example_62(2).unwrap(),
            build_arc2d(&Arc2DSpec::preset("ex61").unwrap()).unwrap(),
        ];
        for s in &spaces {
            for k in Kind::ALL {
                let z = Vector::new(vec![1.0, 0.3]).unwrap();
                let a = if k.is_infimum() { 1.0 } else { 0.5 };
                let est = estimate(s, k, Some(a), Some(&z), &res(), Goal::default()).unwrap();
                if est.empty {
                    continue;
                }
                let v = witness_value(s, &est).unwrap();
                assert!((v - est.attained()).abs() <= 1e-9, "{} {k}: {v} vs {}", s.label(), est.attained());
            }
        }
    }

    #[test]
    fn branch_and_bound_inside_grid_oracle() {
        let s = build_lp(2, 3.0).unwrap();
        for k in Kind::ALL.into_iter().filter(|&k| k != Kind::DeltaUacsed) {
            let a = if k.is_infimum() { 0.75 } else { 0.25 };
            let est = estimate(&s, k, Some(a), None, &res(), Goal::default()).unwrap();
            let o = grid_oracle_2d(&s, k, a, 512).unwrap();
            assert!(est.lo >= o.lo - 1e-12 && est.hi <= o.hi + 1e-12, "{k}: [{}, {}] vs [{}, {}]", est.lo, est.hi, o.lo, o.hi);
        }
    }

    #[test]
    fn goal_stops_early() {
        let s = build_lp(2, 2.0).unwrap();
        let goal = Goal { hi_below: None, lo_above: Some(0.1) };
        let est = estimate(&s, Kind::DeltaX, Some(1.0), None, &res().with_gap(0.0), goal).unwrap();
        assert!(est.lo > 0.1);
    }

    #[test]
    fn sections_reproduce_euclid_r3() {
        let s = build_lp(3, 2.0).unwrap();
        let est = delta_convexity(&s, 1.0, &Resolution { sections: 2, ..res() }).unwrap();
        assert!(est.contains(1.0 - 3f64.sqrt() / 2.0, 1e-9));
        assert!(!est.certified);
        let v = witness_value(&s, &est).unwrap();
        assert!((v - est.hi).abs() < 1e-9);
    }

    #[test]
    fn directional_modulus_dominates_uacs() {
        let s = build_lp(2, 3.0).unwrap();
        let z = Vector::new(vec![1.0, 1.0]).unwrap();
        let d = delta_uacsed(&s, &z, 1.0, &res()).unwrap();
        let u = delta_uacs(&s, 1.0, &res()).unwrap();
        assert!(d.hi >= u.lo - 1e-12);
    }

    #[test]
    fn curve_is_monotone_and_exports() {
        let s = build_lp(2, 2.0).unwrap();
        let c = curve(&s, Kind::DeltaX, &[0.5, 1.0, 1.5], None, &res()).unwrap();
        assert!(c.monotonicity_violations(0.0).is_empty());
        let csv = c.to_csv();
        assert!(csv.starts_with("kind,arg,lo,hi,certified\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn argument_checks() {
        let s = build_lp(2, 2.0).unwrap();
        assert!(delta_convexity(&s, 0.0, &res()).is_err());
        assert!(delta_convexity(&s, 2.5, &res()).is_err());
        assert!(rho_smoothness(&s, -1.0, &res()).is_err());
        assert!(estimate(&s, Kind::DeltaUacsed, Some(1.0), None, &res(), Goal::default()).is_err());
        assert_eq!("delta_uacs".parse::<Kind>().unwrap(), Kind::DeltaUacs);
        assert!("delta".parse::<Kind>().is_err());
    }
}
