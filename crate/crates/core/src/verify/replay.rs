use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Counts, Status};
use crate::catalog::{build_example_62, build_example_63, build_example_64, build_example_65};
use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::normcore::{dual_norm, Functional, NormedSpace};

pub const EXAMPLES: [u32; 4] = [62, 63, 64, 65];

/// Largest index accepted; the truncated dimension grows linearly with it.
pub const MAX_N: usize = 4096;

/// Allowed distance from a claimed limit at the last index.
pub const TERMINAL_GAP: f64 = 2e-2;

const EQUALITY_TOL: f64 = 1e-12;
const DUAL_NORM_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimedLimit {
    pub quantity: String,
    pub limit: f64,
    pub trend: Trend,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceReplay {
    pub example: u32,
    pub n: usize,
    pub dim: usize,
    pub quantities: BTreeMap<String, f64>,
    pub limits: Vec<ClaimedLimit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayCheck {
    pub claim: String,
    pub n: Option<usize>,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub status: Status,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub example: u32,
    pub n_max: usize,
    pub rows: Vec<SequenceReplay>,
    pub checks: Vec<ReplayCheck>,
}

impl ReplayReport {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for k in &self.checks {
            match k.status {
                Status::Verified => c.verified += 1,
                Status::Violated => c.violated += 1,
                Status::Inconclusive => c.inconclusive += 1,
            }
        }
        c
    }

    /// Quantity names in column order.
    pub fn columns(&self) -> Vec<String> {
        self.rows.first().map(|r| r.quantities.keys().cloned().collect()).unwrap_or_default()
    }

    pub fn to_csv(&self) -> String {
        let cols = self.columns();
        let mut out = format!("n,dim,{}\n", cols.join(","));
        for r in &self.rows {
            let vals: Vec<String> = cols.iter().map(|c| format!("{:?}", r.quantities[c])).collect();
            out.push_str(&format!("{},{},{}\n", r.n, r.dim, vals.join(",")));
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lin(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
}

fn limit(q: &str, v: f64, trend: Trend) -> ClaimedLimit {
    ClaimedLimit { quantity: q.into(), limit: v, trend }
}

/// One equality claim: quantity name, its closed form at `n`, tolerance.
type Equality = (&'static str, fn(f64) -> f64, f64);

struct Plan {
    first_n: usize,
    equalities: Vec<Equality>,
    limits: Vec<ClaimedLimit>,
}

fn plan(id: u32) -> Result<Plan> {
    use Trend::*;
    let r2 = std::f64::consts::SQRT_2;
    Ok(match id {
        62 => Plan {
            first_n: 1,
            equalities: vec![
                ("norm_sum", |_| 2.0, EQUALITY_TOL),
                ("norm_x_sq", |n| (2.0 * n + 2.0) / (2.0 * n + 1.0), EQUALITY_TOL),
                ("norm_y_sq", |n| (2.0 * n + 2.0) / (2.0 * n + 1.0), EQUALITY_TOL),
                ("xstar_x", |n| 2.0 * n / (4.0 * n * n + 2.0 * n).sqrt(), EQUALITY_TOL),
                ("xstar_y", |_| 0.0, 0.0),
            ],
            limits: vec![limit("norm_x", 1.0, Decreasing), limit("norm_y", 1.0, Decreasing), limit("xstar_x", 1.0, Increasing)],
        },
        63 => Plan {
            first_n: 2,
            equalities: vec![
                ("norm_x", |_| 1.0, EQUALITY_TOL),
                ("sum_minus_2x", |_| 0.0, EQUALITY_TOL),
                ("norm_xn_sq", |n| 1.0 + 0.5 / (n * n), EQUALITY_TOL),
                ("norm_diff_sq", |n| 2.0 + 2.0 / (n * n), EQUALITY_TOL),
                ("xnstar_xn", |_| 1.0, EQUALITY_TOL),
                ("xnstar_yn", |_| 0.0, EQUALITY_TOL),
            ],
            limits: vec![limit("norm_xn", 1.0, Decreasing), limit("norm_yn", 1.0, Decreasing), limit("norm_diff", r2, Decreasing)],
        },
        64 => Plan {
            first_n: 1,
            equalities: vec![
                ("norm_x", |_| 2.0, EQUALITY_TOL),
                ("sum_minus_2x", |_| 0.0, EQUALITY_TOL),
                ("norm_xn", |n| 1.0 + (1.0 + 1.0 / n).sqrt(), EQUALITY_TOL),
                ("xstar_xn", |_| 2.0, EQUALITY_TOL),
                ("xstar_yn", |_| 0.0, EQUALITY_TOL),
            ],
            limits: vec![limit("norm_xn", 2.0, Decreasing), limit("norm_yn", 2.0, Decreasing)],
        },
        65 => Plan {
            first_n: 1,
            equalities: vec![
                ("norm_x", |_| std::f64::consts::SQRT_2, EQUALITY_TOL),
                ("norm_xn_sq", |n| 1.0 + 1.0 / n + (1.0 + 1.0 / n.sqrt()).powi(2), EQUALITY_TOL),
                ("norm_sum_sq", |n| 4.0 + 1.0 / n + (1.0 + (1.0 + 1.0 / n).sqrt()).powi(2), EQUALITY_TOL),
                ("xstar_xn", |_| std::f64::consts::SQRT_2, EQUALITY_TOL),
                ("xstar_x", |_| 0.0, EQUALITY_TOL),
            ],
            limits: vec![limit("norm_xn", r2, Decreasing), limit("norm_sum", 2.0 * r2, Decreasing)],
        },
        _ => return Err(Error::OutOfRange { name: "example", value: id as f64, range: "one of 62, 63, 64, 65" }),
    })
}

/// Space, the functional whose dual norm is claimed at most 1, and the
/// quantities at index `n`.
fn row(id: u32, n: usize) -> Result<(NormedSpace, Vec<f64>, BTreeMap<String, f64>)> {
    let nf = n as f64;
    let mut q = BTreeMap::new();
    let (space, fstar) = match id {
        62 => {
            let m = 2 * n;
            let s = build_example_62(m)?;
            let beta = 2.0 / (4.0 * nf * nf + 2.0 * nf).sqrt();
            let x: Vec<f64> = (0..m).map(|k| if k % 2 == 0 { beta } else { 0.0 }).collect();
            let y: Vec<f64> = (0..m).map(|k| if k % 2 == 1 { beta } else { 0.0 }).collect();
            let f: Vec<f64> = (0..m).map(|k| if k % 2 == 0 { 1.0 } else { 0.0 }).collect();
            let (nx, ny) = (s.norm(&x), s.norm(&y));
            q.insert("beta".into(), beta);
            q.insert("norm_sum".into(), s.norm(&lin(1.0, &x, 1.0, &y)));
            q.insert("norm_x".into(), nx);
            q.insert("norm_y".into(), ny);
            q.insert("norm_x_sq".into(), nx * nx);
            q.insert("norm_y_sq".into(), ny * ny);
            q.insert("xstar_x".into(), dot(&f, &x));
            q.insert("xstar_y".into(), dot(&f, &y));
            (s, f)
        }
        63 => {
            let s = build_example_63(n, None)?;
            let a = std::f64::consts::FRAC_1_SQRT_2;
            let unit = |k: usize| -> Vec<f64> { (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect() };
            let (e1, en) = (unit(0), unit(n - 1));
            let x: Vec<f64> = e1.iter().map(|c| a * c).collect();
            let xn = lin(a, &e1, a, &en);
            let yn = lin(a, &e1, -a, &en);
            let f = xn.clone();
            let diff = s.norm(&lin(1.0, &xn, -1.0, &yn));
            let (nxn, nyn) = (s.norm(&xn), s.norm(&yn));
            q.insert("norm_x".into(), s.norm(&x));
            q.insert("norm_xn".into(), nxn);
            q.insert("norm_yn".into(), nyn);
            q.insert("norm_xn_sq".into(), nxn * nxn);
            q.insert("sum_minus_2x".into(), s.norm(&lin(1.0, &lin(1.0, &xn, 1.0, &yn), -2.0, &x)));
            q.insert("norm_diff".into(), diff);
            q.insert("norm_diff_sq".into(), diff * diff);
            q.insert("xnstar_xn".into(), dot(&f, &xn));
            q.insert("xnstar_yn".into(), dot(&f, &yn));
            (s, f)
        }
        64 => {
            let m = n + 1;
            let s = build_example_64(m)?;
            let x: Vec<f64> = (0..m).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect();
            let xn: Vec<f64> = (0..m).map(|k| if k == 0 { 1.0 } else { 1.0 / nf }).collect();
            let yn: Vec<f64> = (0..m).map(|k| if k == 0 { 1.0 } else { -1.0 / nf }).collect();
            let f = vec![1.0; m];
            q.insert("norm_x".into(), s.norm(&x));
            q.insert("norm_xn".into(), s.norm(&xn));
            q.insert("norm_yn".into(), s.norm(&yn));
            q.insert("sum_minus_2x".into(), s.norm(&lin(1.0, &lin(1.0, &xn, 1.0, &yn), -2.0, &x)));
            q.insert("xstar_xn".into(), dot(&f, &xn));
            q.insert("xstar_yn".into(), dot(&f, &yn));
            (s, f)
        }
        65 => {
            let m = n + 1;
            let s = build_example_65(m)?;
            let x: Vec<f64> = (0..m).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect();
            let xn: Vec<f64> = (0..m).map(|k| if k == 0 { 0.0 } else { 1.0 / nf }).collect();
            let f: Vec<f64> = (0..m).map(|k| if k == 0 { 0.0 } else { std::f64::consts::SQRT_2 }).collect();
            let (nxn, nsum) = (s.norm(&xn), s.norm(&lin(1.0, &xn, 1.0, &x)));
            q.insert("norm_x".into(), s.norm(&x));
            q.insert("norm_xn".into(), nxn);
            q.insert("norm_xn_sq".into(), nxn * nxn);
            q.insert("norm_sum".into(), nsum);
            q.insert("norm_sum_sq".into(), nsum * nsum);
            q.insert("xstar_xn".into(), dot(&f, &xn));
            q.insert("xstar_x".into(), dot(&f, &x));
            (s, f)
        }
        _ => unreachable!("checked by plan"),
    };
    Ok((space, fstar, q))
}

fn check_n_max(id: u32, n_max: usize) -> Result<Plan> {
    let p = plan(id)?;
    if n_max < p.first_n || n_max > MAX_N {
        return Err(Error::OutOfRange { name: "n_max", value: n_max as f64, range: "first index of the example up to 4096" });
    }
    Ok(p)
}

/// The explicit vectors and functionals of one example at every index up to
/// `n_max`, evaluated in the truncated space that holds their support.
pub fn replay_example(id: u32, n_max: usize) -> Result<Vec<SequenceReplay>> {
    let p = check_n_max(id, n_max)?;
    (p.first_n..=n_max)
        .map(|n| {
            let (space, _, quantities) = row(id, n)?;
            Ok(SequenceReplay { example: id, n, dim: space.dim(), quantities, limits: p.limits.clone() })
        })
        .collect()
}

/// Indices at which the dual-norm bound is checked: powers of two and `n_max`.
fn dual_indices(first: usize, n_max: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|&k| k <= n_max).filter(|&k| k >= first).collect();
    if v.last() != Some(&n_max) {
        v.push(n_max);
    }
    v
}

/// Replays an example and checks its equalities exactly, its limits by a
/// monotone trend with a small terminal gap, and the dual-norm bound on its
/// functional.
pub fn check_replay(id: u32, n_max: usize, res: &Resolution) -> Result<ReplayReport> {
    let p = check_n_max(id, n_max)?;
    let rows = replay_example(id, n_max)?;
    let mut checks = Vec::new();
    for (name, closed, tol) in &p.equalities {
        for r in &rows {
            let v = r.quantities[*name];
            let e = closed(r.n as f64);
            let status = if (v - e).abs() <= *tol { Status::Verified } else { Status::Violated };
            checks.push(ReplayCheck { claim: format!("{name} = closed form"), n: Some(r.n), value: v, expected: e, tolerance: *tol, status, note: None });
        }
    }
    for l in &p.limits {
        let seq: Vec<f64> = rows.iter().map(|r| r.quantities[&l.quantity]).collect();
        let breaks = seq
            .windows(2)
            .filter(|w| match l.trend {
                Trend::Increasing => w[1] < w[0],
                Trend::Decreasing => w[1] > w[0],
            })
            .count();
        let last = *seq.last().expect("non-empty replay");
        let gap = (last - l.limit).abs();
        let status = if breaks == 0 && gap < TERMINAL_GAP { Status::Verified } else { Status::Inconclusive };
        checks.push(ReplayCheck {
            claim: format!("{} -> {} ({:?})", l.quantity, l.limit, l.trend).to_lowercase(),
            n: Some(n_max),
            value: last,
            expected: l.limit,
            tolerance: TERMINAL_GAP,
            status,
            note: Some(format!("{breaks} trend reversals; terminal gap {gap:.4e}")),
        });
    }
    for n in dual_indices(p.first_n, n_max) {
        let (space, f, _) = row(id, n)?;
        let d = dual_norm(&space, &Functional::new(f)?, res)?;
        let bound = 1.0 + DUAL_NORM_SLACK;
        let status = if d.hi <= bound {
            Status::Verified
        } else if d.lo > bound {
            Status::Violated
        } else {
            Status::Inconclusive
        };
        checks.push(ReplayCheck {
            claim: "dual norm of the functional <= 1".into(),
            n: Some(n),
            value: d.hi,
            expected: 1.0,
            tolerance: DUAL_NORM_SLACK,
            status,
            note: (!d.certified).then(|| "sampled support in dimension three and above".into()),
        });
    }
    Ok(ReplayReport { example: id, n_max, rows, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_62_at_two() {
        let rows = replay_example(62, 2).unwrap();
        let q = &rows[1].quantities;
        assert_eq!(rows[1].dim, 4);
        assert!((q["norm_sum"] - 2.0).abs() < 1e-12);
        assert!((q["norm_x"] - (6.0f64 / 5.0).sqrt()).abs() < 1e-12);
        assert_eq!(q["xstar_y"], 0.0);
    }

    #[test]
    fn example_64_functional_values() {
        for r in replay_example(64, 9).unwrap() {
            assert!((r.quantities["xstar_xn"] - 2.0).abs() < 1e-12);
            assert!(r.quantities["xstar_yn"].abs() < 1e-12);
        }
    }

    #[test]
    fn example_65_first_index() {
        let q = &replay_example(65, 1).unwrap()[0].quantities;
        assert!((q["norm_x"] - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((q["xstar_xn"] - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn bad_arguments() {
        assert!(replay_example(61, 3).is_err());
        assert!(replay_example(63, 1).is_err());
        assert!(replay_example(62, MAX_N + 1).is_err());
    }

    #[test]
    fn csv_has_stable_columns() {
        let r = check_replay(62, 3, &Resolution::default()).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("n,dim,beta,norm_sum,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
