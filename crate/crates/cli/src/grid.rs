use anyhow::{bail, Context, Result};
use serde::Deserialize;

/// Grid values as written in a defaults file: a list, or a range string.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Text(String),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::List(v) => check(v.clone()),
            GridSpec::Text(s) => parse_grid(s),
        }
    }
}

fn check(v: Vec<f64>) -> Result<Vec<f64>> {
    if v.is_empty() {
        bail!("empty grid");
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        bail!("grid value {x} is not finite");
    }
    Ok(v)
}

/// `0.25,0.5,1` or the inclusive range `start:stop:step`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let num = |t: &str| -> Result<f64> { t.trim().parse::<f64>().with_context(|| format!("bad grid value `{t}`")) };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, h] = parts.as_slice() else {
            bail!("range must be start:stop:step, got `{s}`");
        };
        let (a, b, h) = (num(a)?, num(b)?, num(h)?);
        if !(h > 0.0) || !(b >= a) {
            bail!("range `{s}` needs step > 0 and stop >= start");
        }
        let count = ((b - a) / h + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            bail!("range `{s}` has {count} points");
        }
        // Rounded so that 0.1:0.3:0.1 gives 0.3 rather than 0.30000000000000004.
        return check((0..count).map(|i| ((a + i as f64 * h) * 1e12).round() / 1e12).collect());
    }
    check(s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_>>()?)
}

/// `a,b,c` into coordinates.
pub fn parse_coords(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().with_context(|| format!("bad coordinate `{t}`"))).collect()
}
