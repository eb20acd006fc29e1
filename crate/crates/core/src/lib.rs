//! Numerical geometry of finite-dimensional real normed spaces.

pub mod catalog;
pub mod classify;
pub mod config;
pub mod error;
pub mod moduli;
pub mod normcore;
pub mod parse;
pub mod sums;
pub mod verify;
mod optim;

pub use config::{Resolution, Tolerances};
pub use error::{Error, Result};
pub use normcore::{Enclosure, Functional, NormedSpace, Vector};
pub use moduli::{Kind, ModulusEstimate, Witness};
pub use parse::{parse_space, ParsedSpace};
pub use sums::SumSpace;
pub use verify::{InequalityReport, Status};
