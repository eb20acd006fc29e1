use anyhow::{anyhow, bail, Result};
use banachlab::catalog::Arc2DSpec;
use banachlab::classify::{classify, ClassificationReport, Verdict};
use banachlab::moduli::{curve, estimate, Goal, Kind, ModulusCurve};
use banachlab::normcore::{dual_norm, quotient_norm, quotient_space, Enclosure};
use banachlab::verify::{check_replay, run_job, summary_csv, Counts, Grids, Manifest, ManifestJob, ManifestOutcome};
use banachlab::{parse_space, Functional, NormedSpace, Vector};
use serde::Serialize;

use crate::grid::{parse_coords, parse_grid, GridSpec};
use crate::{Command, Format, Settings, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VIOLATED};

pub struct Output {
    pub text: String,
    pub counts: Counts,
}

impl Output {
    fn plain(text: String) -> Output {
        Output { text, counts: Counts::default() }
    }

    pub fn code(&self, strict: bool) -> u8 {
        if self.counts.violated > 0 {
            EXIT_VIOLATED
        } else if strict && self.counts.inconclusive > 0 {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_OK
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [String; N]>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn load_space(spec: &str, s: &Settings) -> Result<NormedSpace> {
    Ok(parse_space(spec, &s.res)?.space().clone())
}

fn grid(flag: Option<&str>, file: Option<&GridSpec>) -> Result<Option<Vec<f64>>> {
    match (flag, file) {
        (Some(f), _) => parse_grid(f).map(Some),
        (None, Some(g)) => g.values().map(Some),
        (None, None) => Ok(None),
    }
}

fn enclosure_csv(e: &Enclosure) -> Result<String> {
    csv_rows(["lo", "hi", "certified"], [[format!("{:.17e}", e.lo), format!("{:.17e}", e.hi), e.certified.to_string()]])
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn classification(r: &ClassificationReport, f: Format) -> Result<String> {
    match f {
        Format::Json => json(r),
        Format::Csv => csv_rows(
            ["property", "verdict", "certified", "detail"],
            [("rotund", &r.rotund), ("smooth", &r.smooth), ("acs", &r.acs), ("lau_condition", &r.lau_condition)]
                .into_iter()
                .map(|(n, x)| [n.to_string(), verdict(x.verdict).to_string(), x.certified.to_string(), x.detail.clone()]),
        ),
    }
}

fn direction(d: Option<&str>) -> Result<Option<Vector>> {
    d.map(|t| Ok(Vector::new(parse_coords(t)?)?)).transpose()
}

#[derive(Serialize)]
struct CatalogEntry {
    spec: String,
    description: String,
}

fn catalog_entries() -> Vec<CatalogEntry> {
    let mut v: Vec<CatalogEntry> = [
        ("lp(n,p)", "ℓp norm on R^n, p in [1, inf]"),
        ("ex62(m)", "renorming of ℓ² truncated to 2m coordinates: smooth, not rotund"),
        ("ex63(m)", "weighted renorming of ℓ² truncated to m coordinates"),
        ("ex64(m)", "ℓ¹-type renorming truncated to m+1 coordinates"),
        ("ex65(m)", "ℓ²-sum renorming truncated to m+1 coordinates"),
    ]
    .into_iter()
    .map(|(s, d)| CatalogEntry { spec: format!("catalog:{s}"), description: d.to_string() })
    .collect();
    for name in Arc2DSpec::preset_names() {
        let description = match *name {
            "ex61" => "plane norm with a flat top between two elliptic arcs: acs, neither rotund nor smooth",
            "fig5" => "plane norm with flat sides and a rounded top: not acs, satisfies Lau's condition",
            _ => "plane norm drawn from boundary arcs",
        };
        v.push(CatalogEntry { spec: format!("catalog:arc2d({name})"), description: description.to_string() });
    }
    v
}

#[derive(Serialize)]
struct SumOutput {
    space: String,
    dim: usize,
    outer: String,
    components: Vec<String>,
    classification: ClassificationReport,
    delta_uacs: ModulusCurve,
}

pub fn dispatch(cmd: Command, s: &Settings) -> Result<Output> {
    let d = &s.defaults;
    match cmd {
        Command::Modulus { space, kind, arg, direction: dir } => {
            let sp = load_space(&space, s)?;
            let kind: Kind = kind.parse()?;
            let z = direction(dir.as_deref())?;
            let e = estimate(&sp, kind, arg, z.as_ref(), &s.res, Goal::default())?;
            Ok(Output::plain(match s.format {
                Format::Json => json(&e)?,
                Format::Csv => ModulusCurve { kind, args: vec![arg.unwrap_or(0.0)], estimates: vec![e] }.to_csv(),
            }))
        }
        Command::Curve { space, kind, args, direction: dir } => {
            let sp = load_space(&space, s)?;
            let kind: Kind = kind.parse()?;
            let z = direction(dir.as_deref())?;
            let c = curve(&sp, kind, &parse_grid(&args)?, z.as_ref(), &s.res)?;
            Ok(Output::plain(match s.format {
                Format::Json => json(&c)?,
                Format::Csv => c.to_csv(),
            }))
        }
        Command::Classify { space } => {
            let r = classify(&load_space(&space, s)?, s.tol, &s.res)?;
            Ok(Output::plain(classification(&r, s.format)?))
        }
        Command::Dual { space, functional } => {
            let sp = load_space(&space, s)?;
            let e = dual_norm(&sp, &Functional::new(parse_coords(&functional)?)?, &s.res)?;
            Ok(Output::plain(match s.format {
                Format::Json => json(&e)?,
                Format::Csv => enclosure_csv(&e)?,
            }))
        }
        Command::Quotient { space, basis, vector } => {
            let sp = load_space(&space, s)?;
            let basis = basis.split(';').map(|b| Ok(Vector::new(parse_coords(b)?)?)).collect::<Result<Vec<_>>>()?;
            match vector {
                Some(v) => {
                    let e = quotient_norm(&sp, &basis, &Vector::new(parse_coords(&v)?)?)?;
                    Ok(Output::plain(match s.format {
                        Format::Json => json(&e)?,
                        Format::Csv => enclosure_csv(&e)?,
                    }))
                }
                None => {
                    let q = quotient_space(&sp, &basis, &s.res)?;
                    Ok(Output::plain(classification(&classify(&q, s.tol, &s.res)?, s.format)?))
                }
            }
        }
        Command::Sum { space, eps } => {
            let parsed = parse_space(&space, &s.res)?;
            let Some(sum) = parsed.sum() else {
                bail!("`{space}` is not a sum(...) space");
            };
            let eps = grid(eps.as_deref(), d.eps.as_ref())?.unwrap_or_else(|| Grids::default().eps);
            let c = curve(sum.space(), Kind::DeltaUacs, &eps, None, &s.res)?;
            let out = SumOutput {
                space: sum.space().label().to_string(),
                dim: sum.total_dim(),
                outer: sum.outer().space.label().to_string(),
                components: sum.components().iter().map(|c| c.label().to_string()).collect(),
                classification: classify(sum.space(), s.tol, &s.res)?,
                delta_uacs: c,
            };
            Ok(Output::plain(match s.format {
                Format::Json => json(&out)?,
                Format::Csv => out.delta_uacs.to_csv(),
            }))
        }
        Command::Verify { space, inequality, eps, tau, t, samples, pair_samples, manifest } => {
            let jobs = match manifest {
                Some(path) => Manifest::load(&path)?.jobs,
                None => {
                    if space.is_empty() {
                        bail!("verify needs --space or --manifest");
                    }
                    let mut g = Grids::default();
                    if let Some(v) = grid(eps.as_deref(), d.eps.as_ref())? {
                        g.eps = v;
                    }
                    if let Some(v) = grid(tau.as_deref(), d.tau.as_ref())? {
                        g.tau = v;
                    }
                    g.t = grid(t.as_deref(), d.t.as_ref())?;
                    g.samples = samples.or(d.samples).unwrap_or(g.samples);
                    g.pair_samples = pair_samples.or(d.pair_samples).unwrap_or(g.pair_samples);
                    space.into_iter().map(|sp| ManifestJob { space: sp, inequality: inequality.clone(), grids: g.clone() }).collect()
                }
            };
            let outcomes = jobs.iter().map(|j| run_job(j, &s.res)).collect::<banachlab::Result<Vec<ManifestOutcome>>>()?;
            let mut counts = Counts::default();
            for r in outcomes.iter().flat_map(|o| &o.reports) {
                counts += r.counts();
            }
            let text = match s.format {
                Format::Json => json(&outcomes)?,
                Format::Csv => summary_csv(&outcomes),
            };
            Ok(Output { text, counts })
        }
        Command::Replay { example, n } => {
            let r = check_replay(example, n, &s.res)?;
            let text = match s.format {
                Format::Json => json(&r)?,
                Format::Csv => r.to_csv(),
            };
            Ok(Output { text, counts: r.counts() })
        }
        Command::Catalog => {
            let entries = catalog_entries();
            Ok(Output::plain(match s.format {
                Format::Json => json(&entries)?,
                Format::Csv => csv_rows(["spec", "description"], entries.into_iter().map(|e| [e.spec, e.description]))?,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn out(verified: usize, violated: usize, inconclusive: usize) -> Output {
        Output { text: String::new(), counts: Counts { verified, violated, inconclusive, vacuous: 0 } }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(out(3, 0, 0).code(true), EXIT_OK);
        assert_eq!(out(3, 1, 2).code(false), EXIT_VIOLATED);
        assert_eq!(out(3, 1, 2).code(true), EXIT_VIOLATED);
        assert_eq!(out(3, 0, 2).code(false), EXIT_OK);
        assert_eq!(out(3, 0, 2).code(true), EXIT_INCONCLUSIVE);
    }

    #[test]
    fn catalog_lists_presets() {
        let specs: Vec<String> = catalog_entries().into_iter().map(|e| e.spec).collect();
        assert!(specs.contains(&"catalog:arc2d(ex61)".to_string()));
        assert!(specs.contains(&"catalog:arc2d(fig5)".to_string()));
        assert!(specs.contains(&"catalog:lp(n,p)".to_string()));
    }
}
