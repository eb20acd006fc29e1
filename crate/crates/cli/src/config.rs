//! Defaults file named by `BANACHLAB_CONFIG`. Command-line flags win over it.
//!
//! ```toml
//! format = "csv"
//! tol = 1e-4
//! eps = [0.25, 0.5, 1.0]
//! tau = "0.1:0.5:0.1"
//!
//! [resolution]
//! angles = 1024
//! abs_gap = 1e-5
//! ```

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use banachlab::Resolution;
use serde::Deserialize;

use crate::grid::GridSpec;
use crate::Format;

pub const ENV_VAR: &str = "BANACHLAB_CONFIG";

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub tol: Option<f64>,
    pub eps: Option<GridSpec>,
    pub tau: Option<GridSpec>,
    pub t: Option<GridSpec>,
    pub samples: Option<usize>,
    pub pair_samples: Option<usize>,
    pub resolution: Option<Resolution>,
    /// Accepted for compatibility; every algorithm is deterministic.
    pub seed: Option<u64>,
}

impl Defaults {
    pub fn load(path: &Path) -> Result<Defaults> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
    }

    pub fn from_env() -> Result<Defaults> {
        match std::env::var_os(ENV_VAR) {
            Some(p) if !p.is_empty() => Defaults::load(Path::new(&p)).with_context(|| format!("{ENV_VAR}")),
            _ => Ok(Defaults::default()),
        }
    }
}
