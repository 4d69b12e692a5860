//! Univariate B-spline spaces on open uniform knot vectors.

mod explicit;
mod knots;

pub use explicit::eval_explicit;
pub use knots::{open_uniform_knots, Continuity, KnotVector, SplineSpace};

use crate::error::Result;

/// Active basis values at `x` via the Cox-de Boor recursion.
pub fn eval_basis(space: &SplineSpace, x: f64) -> Result<(usize, Vec<f64>)> {
    space.eval_basis(x)
}

/// Derivatives of the active basis functions at `x`.
pub fn eval_basis_deriv(space: &SplineSpace, x: f64) -> Result<(usize, Vec<f64>)> {
    space.eval_basis_deriv(x)
}
