use nalgebra::{DMatrix, DVector};

use super::sparse::CsrMatrix;
use crate::error::{check_dim, Error, Result};

/// Dense LU factorization with partial pivoting, used for the coarsest level.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
}

impl DenseLu {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        check_dim(a.nrows(), a.ncols(), "dense LU needs a square matrix")?;
        let n = a.nrows();
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(Self { lu, n })
    }

    pub fn from_csr(a: &CsrMatrix) -> Result<Self> {
        Self::new(to_dmatrix(a))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = DVector::from_column_slice(b);
        match self.lu.solve(&rhs) {
            Some(x) => x.as_slice().to_vec(),
            None => vec![f64::NAN; b.len()],
        }
    }
}

pub fn to_dmatrix(a: &CsrMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        let (idx, val) = a.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            d[(i, j as usize)] = v;
        }
    }
    d
}

/// Solve `A x = b` with a dense LU factorization.
pub fn dense_lu_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    check_dim(a.nrows(), b.len(), "dense solve right-hand side")?;
    Ok(DenseLu::new(a.clone())?.solve(b))
}

/// Smallest singular value of a dense matrix.
pub fn min_singular_value(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .singular_values()
        .iter()
        .fold(f64::INFINITY, |m, &s| m.min(s))
}
