//! Text descriptions of spaces.
//!
//! ```text
//! catalog:lp(2,2)   catalog:lp(3,inf)   catalog:ex62(8)   catalog:arc2d(ex61)
//! file:ball.toml    dual(catalog:arc2d(fig5))
//! sum(E=catalog:lp(2,2); catalog:lp(2,2), catalog:arc2d(fig5))
//! ```
//!
//! The `catalog:` prefix is optional. A `file:` path holds either an
//! absolute norm (`dim` plus `kind`) or a planar boundary (`name` plus
//! `pieces`), as TOML or JSON by extension.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::catalog::{
    build_absolute, build_arc2d, build_example_62, build_example_63, build_example_64, build_example_65, build_lp, AbsoluteFile,
    AbsoluteKind, AbsoluteNorm, Arc2DSpec, Exponent,
};
use crate::config::Resolution;
use crate::error::{Error, Result};
use crate::normcore::{dual_space, NormedSpace};
use crate::sums::{build_sum, SumSpace};

#[derive(Clone, Debug)]
pub enum ParsedSpace {
    Plain(NormedSpace),
    Sum(SumSpace),
}

impl ParsedSpace {
    pub fn space(&self) -> &NormedSpace {
        match self {
            ParsedSpace::Plain(s) => s,
            ParsedSpace::Sum(s) => s.space(),
        }
    }

    pub fn sum(&self) -> Option<&SumSpace> {
        match self {
            ParsedSpace::Sum(s) => Some(s),
            ParsedSpace::Plain(_) => None,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(bad(format!("unbalanced `)` in `{s}`")));
                }
            }
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(bad(format!("unbalanced `(` in `{s}`")));
    }
    out.push(s[start..].trim());
    Ok(out)
}

/// `name(args)` into the name and the raw argument text.
fn call(s: &str) -> Result<(&str, &str)> {
    let open = s.find('(').ok_or_else(|| bad(format!("expected `name(...)`, got `{s}`")))?;
    if !s.ends_with(')') {
        return Err(bad(format!("missing closing `)` in `{s}`")));
    }
    Ok((s[..open].trim(), &s[open + 1..s.len() - 1]))
}

fn usize_arg(s: &str, what: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| bad(format!("{what} must be a positive integer, got `{s}`")))
}

fn exponent(s: &str) -> Result<f64> {
    crate::catalog::parse_exponent(s).map_err(bad)
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }
}

fn from_file(path: &str) -> Result<NormedSpace> {
    let path = Path::new(path.trim());
    if let Ok(a) = AbsoluteFile::load(path) {
        return Ok(build_absolute(a.kind, a.dim)?.space);
    }
    let arc: Arc2DSpec = load(path)?;
    build_arc2d(&arc)
}

fn catalog(s: &str) -> Result<NormedSpace> {
    let (name, args) = call(s)?;
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    let one = |what: &str| -> Result<usize> {
        if parts.len() != 1 {
            return Err(bad(format!("{name} takes one argument")));
        }
        usize_arg(parts[0], what)
    };
    match name {
        "lp" => {
            if parts.len() != 2 {
                return Err(bad("lp takes (n, p)"));
            }
            build_lp(usize_arg(parts[0], "n")?, exponent(parts[1])?)
        }
        "ex62" => build_example_62(one("m")?),
        "ex63" => build_example_63(one("m")?, None),
        "ex64" => build_example_64(one("m")?),
        "ex65" => build_example_65(one("m")?),
        "arc2d" => build_arc2d(&Arc2DSpec::preset(args.trim())?),
        other => Err(bad(format!("unknown catalog entry `{other}`"))),
    }
}

/// The outer norm of a sum: an ℓp entry of the catalog or an absolute file.
fn outer_norm(s: &str) -> Result<AbsoluteNorm> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix("file:") {
        let a = AbsoluteFile::load(Path::new(path.trim()))?;
        return build_absolute(a.kind, a.dim);
    }
    let (name, args) = call(s.strip_prefix("catalog:").unwrap_or(s))?;
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if name != "lp" || parts.len() != 2 {
        return Err(bad(format!("E must be catalog:lp(m,p) or file:<absolute norm>, got `{s}`")));
    }
    build_absolute(AbsoluteKind::Lp { p: Exponent(exponent(parts[1])?) }, usize_arg(parts[0], "m")?)
}

pub fn parse_space(spec: &str, res: &Resolution) -> Result<ParsedSpace> {
    let s = spec.trim();
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(ParsedSpace::Plain(from_file(path)?));
    }
    let body = s.strip_prefix("catalog:").unwrap_or(s);
    if body.starts_with("dual(") {
        let (_, inner) = call(body)?;
        return Ok(ParsedSpace::Plain(dual_space(parse_space(inner, res)?.space(), res)));
    }
    if body.starts_with("sum(") {
        let (_, inner) = call(body)?;
        let halves = split_top(inner, ';')?;
        let [outer, comps] = halves.as_slice() else {
            return Err(bad("sum takes `E=<norm>; <space>, <space>, ...`"));
        };
        let outer = outer.strip_prefix("E=").ok_or_else(|| bad("sum must start with `E=`"))?;
        let components = split_top(comps, ',')?
            .into_iter()
            .map(|c| Ok(parse_space(c, res)?.space().clone()))
            .collect::<Result<Vec<_>>>()?;
        return Ok(ParsedSpace::Sum(build_sum(components, outer_norm(outer)?)?));
    }
    Ok(ParsedSpace::Plain(catalog(body)?))
}
