use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Search resolution shared by every estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Resolution {
    /// Initial grid over the full circle of directions (even, at least 8).
    pub angles: usize,
    /// Extra bisection levels the refinement may add below the initial grid.
    pub refine_depth: u32,
    /// Stop refining once the enclosure is narrower than this.
    pub abs_gap: f64,
    /// Relative version of `abs_gap` (fraction of |hi|).
    pub rel_gap: f64,
    /// Budget of refined cells per estimate.
    pub max_cells: usize,
    /// Coordinate-search iterations on the best witness.
    pub polish_iters: usize,
    /// Two-dimensional sections sampled in dimension three and above.
    pub sections: usize,
    /// Boundary nodes of the tabulated dual ball in the plane.
    pub dual_nodes: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            angles: 256,
            refine_depth: 18,
            abs_gap: 1e-4,
            rel_gap: 0.0,
            max_cells: 2_000_000,
            polish_iters: 50,
            sections: 12,
            dual_nodes: 1 << 16,
        }
    }
}

impl Resolution {
    pub fn with_angles(mut self, angles: usize) -> Self {
        self.angles = angles;
        self
    }

    pub fn with_gap(mut self, abs_gap: f64) -> Self {
        self.abs_gap = abs_gap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.angles < 8 || self.angles % 2 != 0 {
            return Err(Error::Config(format!("angles must be even and at least 8, got {}", self.angles)));
        }
        if !(self.abs_gap >= 0.0 && self.rel_gap >= 0.0 && self.rel_gap < 1.0) {
            return Err(Error::Config("gaps must be non-negative and rel_gap below 1".into()));
        }
        if self.dual_nodes < 64 || self.dual_nodes % 2 != 0 {
            return Err(Error::Config("dual_nodes must be even and at least 64".into()));
        }
        Ok(())
    }

    pub(crate) fn gap(&self, hi: f64) -> f64 {
        self.abs_gap.max(self.rel_gap * hi.abs())
    }
}

/// Tolerances for exact-arithmetic claims, optimisation-backed claims, and
/// classification verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub exact: f64,
    pub optim: f64,
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { exact: 1e-9, optim: 1e-6, classify: 1e-4 }
    }
}
