use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{build_lp, lp_norm, p_label};
use crate::error::{Error, Result};
use crate::normcore::NormedSpace;

/// An exponent in `[1, ∞]`; serialised as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent(p)),
            Raw::Text(t) => parse_exponent(&t).map(Exponent).map_err(serde::de::Error::custom),
        }
    }
}

pub(crate) fn parse_exponent(t: &str) -> std::result::Result<f64, String> {
    match t.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        other => other.parse::<f64>().map_err(|_| format!("bad exponent `{other}`")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixPart {
    pub weight: f64,
    pub p: Exponent,
}

/// Declarative description of an absolute norm on `R^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbsoluteKind {
    Lp { p: Exponent },
    WeightedLp { p: Exponent, weights: Vec<f64> },
    /// `Σ w_k ||a||_{p_k}`.
    Mix { parts: Vec<MixPart> },
    /// A caller-supplied evaluator; only the label is recorded.
    Custom { label: String },
}

impl fmt::Display for AbsoluteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsoluteKind::Lp { p } => write!(f, "lp({})", p_label(p.0)),
            AbsoluteKind::WeightedLp { p, weights } => write!(f, "weighted_lp({};{:?})", p_label(p.0), weights),
            AbsoluteKind::Mix { parts } => {
                let s: Vec<String> = parts.iter().map(|q| format!("{}*l{}", q.weight, p_label(q.p.0))).collect();
                write!(f, "mix({})", s.join("+"))
            }
            AbsoluteKind::Custom { label } => write!(f, "{label}"),
        }
    }
}

/// File form: the kind plus the dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsoluteFile {
    pub dim: usize,
    #[serde(flatten)]
    pub kind: AbsoluteKind,
}

impl AbsoluteFile {
    pub fn load(path: &std::path::Path) -> Result<AbsoluteFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json");
        if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
    }
}

/// A norm on `R^m` together with the outcome of its sampled certification.
#[derive(Clone, Debug)]
pub struct AbsoluteNorm {
    pub kind: AbsoluteKind,
    pub space: NormedSpace,
    pub certified_absolute: bool,
    pub certified_normalized: bool,
    pub failures: Vec<String>,
}

impl AbsoluteNorm {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn eval(&self, a: &[f64]) -> f64 {
        self.space.norm(a)
    }

    pub fn is_certified(&self) -> bool {
        self.certified_absolute && self.certified_normalized
    }

    /// Fails with the recorded witnesses unless both certificates hold.
    pub fn require_certified(&self) -> Result<()> {
        if self.is_certified() {
            Ok(())
        } else {
            Err(Error::Certification(self.failures.join("; ")))
        }
    }
}

pub const DEFAULT_CERT_SAMPLES: usize = 1000;

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "p", value: p, range: "[1, inf]" })
    }
}

pub fn build_absolute(kind: AbsoluteKind, m: usize) -> Result<AbsoluteNorm> {
    if m == 0 {
        return Err(Error::OutOfRange { name: "m", value: 0.0, range: "m >= 1" });
    }
    let space = match &kind {
        AbsoluteKind::Lp { p } => build_lp(m, p.0)?,
        AbsoluteKind::WeightedLp { p, weights } => {
            check_p(p.0)?;
            if weights.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: weights.len() });
            }
            if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                return Err(Error::OutOfRange { name: "weight", value: f64::NAN, range: "(0, inf)" });
            }
            let (p, w) = (p.0, weights.clone());
            NormedSpace::builder(m, kind.to_string(), move |a| {
                let s: Vec<f64> = a.iter().zip(&w).map(|(x, wi)| if p.is_infinite() { x * wi } else { x * wi.powf(1.0 / p) }).collect();
                lp_norm(&s, p)
            })
            .build()
        }
        AbsoluteKind::Mix { parts } => {
            if parts.is_empty() {
                return Err(Error::Empty);
            }
            for q in parts {
                check_p(q.p.0)?;
                if !(q.weight > 0.0) {
                    return Err(Error::OutOfRange { name: "weight", value: q.weight, range: "(0, inf)" });
                }
            }
            let parts: Vec<(f64, f64)> = parts.iter().map(|q| (q.weight, q.p.0)).collect();
            NormedSpace::builder(m, kind.to_string(), move |a| parts.iter().map(|&(w, p)| w * lp_norm(a, p)).sum()).build()
        }
        AbsoluteKind::Custom { .. } => {
            return Err(Error::Config("custom absolute norms need an evaluator; use build_absolute_custom".into()));
        }
    };
    Ok(certify(kind, space, DEFAULT_CERT_SAMPLES))
}

pub fn build_absolute_custom(
    label: impl Into<String>,
    m: usize,
    eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
) -> Result<AbsoluteNorm> {
    if m == 0 {
        return Err(Error::OutOfRange { name: "m", value: 0.0, range: "m >= 1" });
    }
    let label = label.into();
    let eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = Arc::new(eval);
    let space = NormedSpace::builder(m, label.clone(), move |a| eval(a)).build();
    Ok(certify(AbsoluteKind::Custom { label }, space, DEFAULT_CERT_SAMPLES))
}

fn certify(kind: AbsoluteKind, space: NormedSpace, samples: usize) -> AbsoluteNorm {
    const TOL: f64 = 1e-12;
    let m = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0xab5_0107e);
    let mut failures = Vec::new();
    let (mut absolute, mut normalized) = (true, true);
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        let v = space.norm(&e);
        if (v - 1.0).abs() > TOL {
            normalized = false;
            failures.push(format!("not normalised: ||e_{}|| = {v}", i + 1));
        }
    }
    for _ in 0..samples {
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let na = space.norm(&a);
        if absolute {
            let flipped: Vec<f64> = a.iter().map(|x| if rng.gen_bool(0.5) { -x } else { *x }).collect();
            let nf = space.norm(&flipped);
            if (nf - na).abs() > TOL * na {
                absolute = false;
                failures.push(format!("not absolute: ||{a:?}|| = {na} but ||{flipped:?}|| = {nf}"));
            }
        }
        if absolute {
            let b: Vec<f64> = a.iter().map(|x| x * rng.gen_range(0.0..=1.0)).collect();
            let nb = space.norm(&b);
            if nb > na * (1.0 + TOL) {
                absolute = false;
                failures.push(format!("not monotone: ||{b:?}|| = {nb} > ||{a:?}|| = {na}"));
            }
        }
        if normalized {
            let sup = a.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            let one: f64 = a.iter().map(|x| x.abs()).sum();
            if na < sup * (1.0 - TOL) || na > one * (1.0 + TOL) {
                normalized = false;
                failures.push(format!("outside the l1-linf sandwich at {a:?}: {sup} <= {na} <= {one} fails"));
            }
        }
    }
    AbsoluteNorm { kind, space, certified_absolute: absolute, certified_normalized: normalized, failures }
}
