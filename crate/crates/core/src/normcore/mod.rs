//! Finite-dimensional normed spaces and the objects derived from a norm:
//! dual norms, norming functionals, subdifferentials and quotients.

mod dual;
pub(crate) mod plane;
mod quotient;
mod space;
mod subdiff;
mod vector;

pub use dual::{dual_norm, dual_space, dual_space_with, DualMode, Enclosure};
pub use quotient::{quotient_norm, quotient_space, Subspace};
pub use space::{DirDerivFn, Equivalence, EvalFn, NormedSpace, SpaceBuilder, SubgradFn};
pub use subdiff::{
    norming_functional, norming_functional_toward, smoothness_gap, subdifferential, Subdifferential,
    DEFAULT_T_SCHEDULE,
};
pub use vector::{Functional, Vector};

pub(crate) use dual::support_nd;
#[cfg(test)]
pub(crate) use space::fd_dir_deriv;
pub(crate) use vector::{axpy, dot, euclid};

use crate::config::Resolution;
use crate::error::Result;

pub fn norm_eval(space: &NormedSpace, v: &Vector) -> Result<f64> {
    space.norm_eval(v)
}

/// Recompute `(c, C)` with `c|v|_2 <= ||v|| <= C|v|_2`; certified in the plane.
pub fn equivalence_constants(space: &NormedSpace, res: &Resolution) -> Equivalence {
    space::compute_equivalence(space, (16 * res.angles).max(space::DEFAULT_EQUIV_SAMPLES))
}
