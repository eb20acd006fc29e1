mod commands;
mod config;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use banachlab::Resolution;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::config::Defaults;

/// Exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VIOLATED: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

/// Minimum initial grid accepted on the command line.
const MIN_ANGLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "banachlab", version, about = "Moduli, classification and inequality checks for finite-dimensional normed spaces")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for the parallel parts; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Initial angular grid (at least 64).
    #[arg(long, global = true)]
    angles: Option<usize>,
    /// Absolute enclosure width at which refinement stops.
    #[arg(long, global = true)]
    gap: Option<f64>,
    /// Refinement levels below the initial grid.
    #[arg(long, global = true)]
    refine_depth: Option<u32>,
    /// Sampled sections in dimension three and above.
    #[arg(long, global = true)]
    sections: Option<usize>,
    /// Classification tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Exit with code 3 when nothing is violated but something is inconclusive.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One modulus estimate.
    Modulus {
        #[arg(long)]
        space: String,
        #[arg(long)]
        kind: String,
        /// ε for δ-type moduli, τ for ρ-type ones.
        #[arg(long, visible_aliases = ["eps", "tau"])]
        arg: Option<f64>,
        /// Direction `z` for delta_uacsed, as comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
    },
    /// A modulus over a grid of arguments.
    Curve {
        #[arg(long)]
        space: String,
        #[arg(long)]
        kind: String,
        /// `a,b,c` or `start:stop:step`.
        #[arg(long, visible_aliases = ["eps", "tau"])]
        args: String,
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
    },
    /// Rotundity, smoothness, acs and Lau's condition.
    Classify {
        #[arg(long)]
        space: String,
    },
    /// Dual norm of a functional.
    Dual {
        #[arg(long)]
        space: String,
        #[arg(long, allow_hyphen_values = true)]
        functional: String,
    },
    /// Quotient by a subspace: the norm of one class, or a classification of
    /// the quotient space when no vector is given.
    Quotient {
        #[arg(long)]
        space: String,
        /// Basis vectors separated by `;`, coordinates by `,`.
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
    },
    /// Build an absolute sum, classify it and tabulate δ_uacs.
    Sum {
        /// `sum(E=<outer>; <space>, <space>, ...)`.
        #[arg(long)]
        space: String,
        #[arg(long)]
        eps: Option<String>,
    },
    /// Numerical checks of the modulus inequalities.
    Verify {
        /// Repeatable.
        #[arg(long)]
        space: Vec<String>,
        /// An inequality id, or `all`.
        #[arg(long, default_value = "all")]
        inequality: String,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        t: Option<String>,
        /// Random quotients sampled by quotient_acs.
        #[arg(long)]
        samples: Option<usize>,
        /// Flat pairs sampled by acs_characterizations.
        #[arg(long)]
        pair_samples: Option<usize>,
        /// TOML or JSON batch file with `[[job]]` entries.
        #[arg(long, conflicts_with = "space")]
        manifest: Option<PathBuf>,
    },
    /// Exact replay of the sequences of examples 62 to 65.
    Replay {
        #[arg(long)]
        example: u32,
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
    /// List the built-in spaces.
    Catalog,
}

/// Settings after merging flags, the defaults file and built-in values.
pub struct Settings {
    pub format: Format,
    pub output: Option<PathBuf>,
    pub res: Resolution,
    pub tol: f64,
    pub strict: bool,
    pub defaults: Defaults,
}

fn settings(c: &Common, d: Defaults) -> Result<Settings> {
    let mut res = d.resolution.unwrap_or_default();
    if let Some(a) = c.angles {
        res.angles = a;
    }
    if let Some(g) = c.gap {
        res.abs_gap = g;
    }
    if let Some(r) = c.refine_depth {
        res.refine_depth = r;
    }
    if let Some(s) = c.sections {
        res.sections = s;
    }
    if res.angles < MIN_ANGLES {
        bail!("angles must be at least {MIN_ANGLES}, got {}", res.angles);
    }
    res.validate()?;
    let tol = c.tol.or(d.tol).unwrap_or(banachlab::classify::DEFAULT_TOL);
    if let Some(n) = c.jobs.or(d.jobs) {
        if n == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting the worker pool")?;
    }
    Ok(Settings {
        format: c.format.or(d.format).unwrap_or(Format::Json),
        output: c.output.clone().or(d.output.clone()),
        res,
        tol,
        strict: c.strict,
        defaults: d,
    })
}

fn emit(s: &Settings, text: &str) -> Result<()> {
    match &s.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let s = settings(&cli.common, Defaults::from_env()?)?;
    let out = commands::dispatch(cli.command, &s)?;
    emit(&s, &out.text)?;
    Ok(out.code(s.strict))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
