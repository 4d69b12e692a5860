//! Zero-fill incomplete LU factorization on the pattern of the input matrix.

use super::sparse::CsrMatrix;
use crate::error::{check_dim, Error, Result};

/// Combined `L\U` storage: the strictly lower part holds `L` (unit diagonal
/// implied) and the rest holds `U`.
#[derive(Clone, Debug)]
pub struct Ilu0 {
    lu: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        Self::from_matrix(a.clone())
    }

    /// Factor in place, reusing the storage of `a`.
    pub fn from_matrix(mut lu: CsrMatrix) -> Result<Self> {
        check_dim(lu.rows(), lu.cols(), "ILU(0) needs a square matrix")?;
        let n = lu.rows();
        let (indptr, indices, vals) = lu.parts_mut();
        let mut diag = vec![usize::MAX; n];
        for i in 0..n {
            for k in indptr[i]..indptr[i + 1] {
                if indices[k] as usize == i {
                    diag[i] = k;
                }
            }
            if diag[i] == usize::MAX {
                return Err(Error::ZeroPivot { row: i });
            }
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (a0, a1) = (indptr[i], indptr[i + 1]);
            for k in a0..a1 {
                pos[indices[k] as usize] = k;
            }
            for kk in a0..a1 {
                let k = indices[kk] as usize;
                if k >= i {
                    break;
                }
                let pivot = vals[diag[k]];
                let lik = vals[kk] / pivot;
                vals[kk] = lik;
                for kj in diag[k] + 1..indptr[k + 1] {
                    let p = pos[indices[kj] as usize];
                    if p != usize::MAX {
                        vals[p] -= lik * vals[kj];
                    }
                }
            }
            let d = vals[diag[i]];
            if d == 0.0 || !d.is_finite() {
                return Err(Error::ZeroPivot { row: i });
            }
            for k in a0..a1 {
                pos[indices[k] as usize] = usize::MAX;
            }
        }
        Ok(Self { lu, diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn factors(&self) -> &CsrMatrix {
        &self.lu
    }

    /// `z = (LU)⁻¹ v` by forward then backward substitution.
    pub fn apply(&self, v: &[f64], z: &mut [f64]) {
        let n = self.dim();
        let ip = self.lu.indptr();
        let ix = self.lu.indices();
        let vx = self.lu.values();
        for i in 0..n {
            let mut s = v[i];
            for k in ip[i]..self.diag[i] {
                s -= vx[k] * z[ix[k] as usize];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in self.diag[i] + 1..ip[i + 1] {
                s -= vx[k] * z[ix[k] as usize];
            }
            z[i] = s / vx[self.diag[i]];
        }
    }

    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; v.len()];
        self.apply(v, &mut z);
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_exact() {
        let a = CsrMatrix::diagonal(&[2.0, 4.0, 8.0]);
        let f = Ilu0::new(&a).unwrap();
        assert_eq!(f.solve(&[2.0, 4.0, 8.0]), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn tridiagonal_is_exact_lu() {
        let n = 12;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.5));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, t).unwrap();
        let f = Ilu0::new(&a).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = a.mul_vec(&x);
        let y = f.solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_diagonal_reports_row() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        match Ilu0::new(&a) {
            Err(Error::ZeroPivot { row }) => assert_eq!(row, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
