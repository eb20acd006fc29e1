use serde::{Deserialize, Serialize};

use super::{
    check_acs_characterizations, check_delta_rho, check_delta_tilde_rho, check_dual_inequalities, check_lipschitz_delta_uacs,
    check_quotient_acs, check_sum_theorems, check_superreflexivity_criterion, Inequality, InequalityReport,
};
use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::parse::{parse_space, ParsedSpace};

fn default_eps() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 1.5]
}

fn default_tau() -> Vec<f64> {
    vec![0.1, 0.25, 0.5]
}

fn default_samples() -> usize {
    20
}

fn default_pairs() -> usize {
    5
}

/// Argument grids shared by every check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_tau")]
    pub tau: Vec<f64>,
    /// Defaults to the τ grid.
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_pairs")]
    pub pair_samples: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids { eps: default_eps(), tau: default_tau(), t: None, samples: default_samples(), pair_samples: default_pairs() }
    }
}

/// One space against one inequality, or against every applicable one when
/// `inequality` is `"all"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestJob {
    pub space: String,
    pub inequality: String,
    #[serde(flatten)]
    pub grids: Grids,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(rename = "job")]
    pub jobs: Vec<ManifestJob>,
}

impl Manifest {
    pub fn load(path: &std::path::Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestOutcome {
    pub space: String,
    pub reports: Vec<InequalityReport>,
}

/// Whether `ineq` applies to the parsed space at all.
pub fn applicable(ineq: Inequality, parsed: &ParsedSpace) -> bool {
    match ineq {
        Inequality::QuotientAcs => parsed.space().dim() >= 3,
        Inequality::SumTheorems => parsed.sum().is_some(),
        _ => true,
    }
}

/// Runs one inequality; the three dual statements are computed together, so
/// asking for one of them still returns only that one.
pub fn run_check(parsed: &ParsedSpace, ineq: Inequality, grids: &Grids, res: &Resolution) -> Result<InequalityReport> {
    let space = parsed.space();
    let t = grids.t.as_deref().unwrap_or(&grids.tau);
    match ineq {
        Inequality::DeltaRho => check_delta_rho(space, &grids.eps, &grids.tau, res),
        Inequality::DeltaTildeRho => check_delta_tilde_rho(space, &grids.eps, res),
        Inequality::LipschitzDeltaUacs => {
            let inside: Vec<f64> = grids.eps.iter().copied().filter(|&e| e > 0.0 && e < 1.0).collect();
            check_lipschitz_delta_uacs(space, &inside, res)
        }
        Inequality::DualDeltaRho | Inequality::DualDeltaRhoBall | Inequality::DualComposition => {
            let d = check_dual_inequalities(space, &grids.eps, &grids.tau, res)?;
            Ok(match ineq {
                Inequality::DualDeltaRho => d.dual_delta_rho,
                Inequality::DualDeltaRhoBall => d.dual_delta_rho_ball,
                _ => d.dual_composition,
            })
        }
        Inequality::Superreflexivity => check_superreflexivity_criterion(space, t, res),
        Inequality::QuotientAcs => check_quotient_acs(space, grids.samples, res),
        Inequality::SumTheorems => {
            let sum = parsed.sum().ok_or_else(|| Error::Config("sum_theorems needs a sum(...) space".into()))?;
            check_sum_theorems(sum, &grids.eps, res)
        }
        Inequality::AcsCharacterizations => check_acs_characterizations(space, grids.pair_samples, res),
    }
}

/// Every applicable inequality, with the dual statements computed once.
pub fn run_all(parsed: &ParsedSpace, grids: &Grids, res: &Resolution) -> Result<Vec<InequalityReport>> {
    let mut out = Vec::new();
    for ineq in Inequality::ALL {
        if !applicable(ineq, parsed) {
            continue;
        }
        match ineq {
            Inequality::DualDeltaRho => {
                out.extend(check_dual_inequalities(parsed.space(), &grids.eps, &grids.tau, res)?.into_vec());
            }
            Inequality::DualDeltaRhoBall | Inequality::DualComposition => {}
            _ => out.push(run_check(parsed, ineq, grids, res)?),
        }
    }
    Ok(out)
}

pub fn run_job(job: &ManifestJob, res: &Resolution) -> Result<ManifestOutcome> {
    let parsed = parse_space(&job.space, res)?;
    let reports = if job.inequality == "all" {
        run_all(&parsed, &job.grids, res)?
    } else {
        vec![run_check(&parsed, job.inequality.parse()?, &job.grids, res)?]
    };
    Ok(ManifestOutcome { space: job.space.clone(), reports })
}

pub fn run_manifest(manifest: &Manifest, res: &Resolution) -> Result<Vec<ManifestOutcome>> {
    manifest.jobs.iter().map(|j| run_job(j, res)).collect()
}

/// One row per report: `space,inequality,points,verified,violated,inconclusive,vacuous,min_margin`.
pub fn summary_csv(outcomes: &[ManifestOutcome]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["space", "inequality", "points", "verified", "violated", "inconclusive", "vacuous", "min_margin"])
        .expect("in-memory write");
    for o in outcomes {
        for r in &o.reports {
            let c = r.counts();
            let margin = r.min_margin().map(|m| format!("{m:.6e}")).unwrap_or_default();
            w.write_record([
                o.space.clone(),
                r.id.clone(),
                r.points.len().to_string(),
                c.verified.to_string(),
                c.violated.to_string(),
                c.inconclusive.to_string(),
                c.vacuous.to_string(),
                margin,
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses_with_defaults() {
        let m: Manifest = toml::from_str(
            "[[job]]\nspace = \"catalog:lp(2,2)\"\ninequality = \"delta_rho\"\neps = [1.0]\n\n[[job]]\nspace = \"catalog:lp(3,1)\"\ninequality = \"all\"\n",
        )
        .unwrap();
        assert_eq!(m.jobs.len(), 2);
        assert_eq!(m.jobs[0].grids.eps, vec![1.0]);
        assert_eq!(m.jobs[0].grids.tau, default_tau());
        assert_eq!(m.jobs[1].grids.samples, 20);
    }

    #[test]
    fn summary_has_header_and_rows() {
        let m: Manifest =
            toml::from_str("[[job]]\nspace = \"catalog:lp(2,inf)\"\ninequality = \"lipschitz_delta_uacs\"\neps = [0.25, 0.5]\n").unwrap();
        let out = run_manifest(&m, &Resolution::default()).unwrap();
        let csv = summary_csv(&out);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "space,inequality,points,verified,violated,inconclusive,vacuous,min_margin");
        assert!(lines[1].starts_with("\"catalog:lp(2,inf)\",lipschitz_delta_uacs,1,1,0,0,0,"), "{}", lines[1]);
    }
}
