//! Sparse and dense kernels shared by the rest of the crate.

pub mod dense;
pub mod ilu0;
pub mod krylov;
pub mod lanczos;
pub mod matrix_market;
pub mod sparse;

pub use dense::{dense_lu_solve, DenseLu};
pub use ilu0::Ilu0;
pub use krylov::{fcg, fcg_fixed, pcg, pcg_ritz_bounds, SolveReport};
pub use lanczos::{
    lanczos, lanczos_pencil, largest_eig, smallest_eig, EigEstimate, Extreme, LanczosOptions,
    SmallestMode,
};
pub use sparse::{axpy, dot, norm2, CsrMatrix};
