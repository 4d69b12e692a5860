//! Algebraic multilevel iteration (AMLI) preconditioners for isogeometric
//! discretizations of scalar elliptic problems on B-spline and NURBS patches.
//!
//! The crate is organised bottom-up:
//!
//! - [`splines`]: knot vectors, Cox-de Boor evaluation and closed-form bases.
//! - [`geometry`]: NURBS patches for the unit square, quarter annulus and
//!   quarter thick ring, plus manufactured solutions.
//! - [`assembly`]: Galerkin stiffness/load assembly with Dirichlet elimination.
//! - [`linalg`]: CSR kernels, ILU(0), dense LU, Lanczos, PCG and FCG.
//! - [`transfer`]: coarse-to-fine restriction operators for B-splines and NURBS.
//! - [`splitting`]: hierarchical complements, two-level transforms and the
//!   splitting quality metrics.
//! - [`amli`]: the multilevel hierarchy and the linear/nonlinear cycles.
//! - [`experiment`]: end-to-end runs producing table rows and operator dumps.

pub mod amli;
pub mod assembly;
mod error;
pub mod experiment;
pub mod geometry;
pub mod linalg;
pub mod splines;
pub mod splitting;
pub mod transfer;

pub use error::{Error, Result};
