//! Numerical checks of the inequalities relating the uacs moduli, and exact
//! replays of the explicit sequences that separate the sequential classes.
//!
//! Every check has the shape `LHS >= RHS` with both sides enclosed. A grid
//! point is `verified` only in the strong direction `LHS.lo >= RHS.hi`, and
//! `violated` only when `LHS.hi < RHS.lo`; anything in between stays
//! `inconclusive`.

mod batch;
mod inequalities;
mod replay;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use batch::{applicable, run_all, run_check, run_job, run_manifest, summary_csv, Grids, Manifest, ManifestJob, ManifestOutcome};
pub use inequalities::{
    check_acs_characterizations, check_delta_rho, check_delta_tilde_rho, check_dual_inequalities, check_lipschitz_delta_uacs,
    check_quotient_acs, check_sum_theorems, check_superreflexivity_criterion, DualReports, Inequality,
};
pub use replay::{check_replay, replay_example, ClaimedLimit, ReplayCheck, ReplayReport, SequenceReplay, Trend, EXAMPLES, TERMINAL_GAP};

/// Rounding allowance when comparing two enclosure endpoints.
pub const ROUNDING: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Violated,
    Inconclusive,
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Interval {
        Interval { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval { lo: lo.min(hi), hi: hi.max(lo) }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;

    fn add(self, o: Interval) -> Interval {
        Interval { lo: self.lo + o.lo, hi: self.hi + o.hi }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub args: BTreeMap<String, f64>,
    pub lhs: Option<Interval>,
    pub rhs: Option<Interval>,
    pub status: Status,
    /// The hypothesis of the statement is not met at this point.
    pub vacuous: bool,
    /// `lhs.lo - rhs.hi`.
    pub margin: Option<f64>,
    pub note: Option<String>,
    pub witness: Option<serde_json::Value>,
}

impl PointResult {
    /// Compares `lhs >= rhs` in the strong direction.
    pub fn compare(args: &[(&str, f64)], lhs: Interval, rhs: Interval) -> PointResult {
        let margin = lhs.lo - rhs.hi;
        let status = if margin >= -ROUNDING {
            Status::Verified
        } else if lhs.hi < rhs.lo - ROUNDING {
            Status::Violated
        } else {
            Status::Inconclusive
        };
        PointResult {
            args: args.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            status,
            vacuous: false,
            margin: Some(margin),
            note: None,
            witness: None,
        }
    }

    pub fn vacuous(args: &[(&str, f64)], note: impl Into<String>) -> PointResult {
        PointResult {
            args: args.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs: None,
            rhs: None,
            status: Status::Inconclusive,
            vacuous: true,
            margin: None,
            note: Some(note.into()),
            witness: None,
        }
    }

    /// A point decided by a verdict rather than by two enclosures.
    pub fn decided(args: &[(&str, f64)], status: Status, note: impl Into<String>) -> PointResult {
        PointResult {
            args: args.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs: None,
            rhs: None,
            status,
            vacuous: false,
            margin: None,
            note: Some(note.into()),
            witness: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> PointResult {
        self.note = Some(note.into());
        self
    }

    pub fn with_witness(mut self, w: serde_json::Value) -> PointResult {
        self.witness = Some(w);
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub verified: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub vacuous: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.verified += o.verified;
        self.violated += o.violated;
        self.inconclusive += o.inconclusive;
        self.vacuous += o.vacuous;
    }
}

impl Counts {
    pub fn total(&self) -> usize {
        self.verified + self.violated + self.inconclusive
    }

    /// Share of points verified in the strong direction.
    pub fn strong_rate(&self) -> f64 {
        if self.total() == 0 {
            return 1.0;
        }
        self.verified as f64 / self.total() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: String,
    pub statement: String,
    pub space: String,
    pub grid: BTreeMap<String, Vec<f64>>,
    pub points: Vec<PointResult>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub fn new(id: Inequality, space: &str, grid: &[(&str, &[f64])]) -> InequalityReport {
        InequalityReport {
            id: id.name().to_string(),
            statement: id.statement().to_string(),
            space: space.to_string(),
            grid: grid.iter().map(|(k, v)| (k.to_string(), v.to_vec())).collect(),
            points: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for p in &self.points {
            match p.status {
                Status::Verified => c.verified += 1,
                Status::Violated => c.violated += 1,
                Status::Inconclusive => c.inconclusive += 1,
            }
            c.vacuous += p.vacuous as usize;
        }
        c
    }

    pub fn violations(&self) -> impl Iterator<Item = &PointResult> {
        self.points.iter().filter(|p| p.status == Status::Violated)
    }

    /// Smallest margin over the decided points.
    pub fn min_margin(&self) -> Option<f64> {
        self.points.iter().filter_map(|p| p.margin).min_by(f64::total_cmp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_direction_only() {
        let v = PointResult::compare(&[("eps", 1.0)], Interval::new(0.3, 0.31), Interval::new(0.1, 0.2));
        assert_eq!(v.status, Status::Verified);
        assert!((v.margin.unwrap() - 0.1).abs() < 1e-15);
        let overlap = PointResult::compare(&[], Interval::new(0.15, 0.3), Interval::new(0.1, 0.2));
        assert_eq!(overlap.status, Status::Inconclusive);
        let bad = PointResult::compare(&[], Interval::new(0.0, 0.05), Interval::new(0.1, 0.2));
        assert_eq!(bad.status, Status::Violated);
    }

    #[test]
    fn counts_and_rate() {
        let mut r = InequalityReport::new(Inequality::DeltaRho, "x", &[("eps", &[1.0])]);
        r.points.push(PointResult::compare(&[], Interval::point(1.0), Interval::point(0.0)));
        r.points.push(PointResult::vacuous(&[], "empty hypothesis"));
        let c = r.counts();
        assert_eq!((c.verified, c.inconclusive, c.vacuous), (1, 1, 1));
        assert_eq!(c.strong_rate(), 0.5);
        assert_eq!(r.min_margin(), Some(1.0));
    }
}
