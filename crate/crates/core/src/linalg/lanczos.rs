//! Lanczos estimation of extreme eigenvalues, for standard and generalized
//! symmetric problems, with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::{axpy, dot, CsrMatrix};

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub max_steps: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_steps: 300,
            tol: 1e-6,
            seed: 0x5eed,
        }
    }
}

/// Which end of the spectrum to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Largest,
    Smallest,
}

#[derive(Clone, Copy, Debug)]
pub struct EigEstimate {
    pub value: f64,
    /// Residual bound of the Ritz pair divided by `|value|`.
    pub rel_residual: f64,
    pub converged: bool,
    pub steps: usize,
}

/// Lanczos for `K v = λ M v` with `K` symmetric and `M` SPD.
///
/// `k_apply(v)` returns `K v`, `m_apply(v)` returns `M v` and `m_solve(z)`
/// returns `M⁻¹ z`. The basis is kept `M`-orthonormal.
pub fn lanczos_pencil(
    n: usize,
    k_apply: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    m_apply: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    m_solve: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    which: Extreme,
    opts: LanczosOptions,
) -> EigEstimate {
    if n == 0 {
        return EigEstimate {
            value: 0.0,
            rel_residual: 0.0,
            converged: true,
            steps: 0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut mv = m_apply(&v);
    let nrm = dot(&v, &mv).max(0.0).sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    mv.iter_mut().for_each(|x| *x /= nrm);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut mbasis: Vec<Vec<f64>> = vec![mv];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let max_steps = opts.max_steps.min(n);
    let mut best = EigEstimate {
        value: f64::NAN,
        rel_residual: f64::INFINITY,
        converged: false,
        steps: 0,
    };

    for j in 0..max_steps {
        let z = k_apply(&basis[j]);
        let mut u = m_solve(&z);
        let a = dot(&basis[j], &z);
        alpha.push(a);
        axpy(-a, &basis[j], &mut u);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut u);
        }
        for _ in 0..2 {
            for (bi, mbi) in basis.iter().zip(&mbasis) {
                let c = dot(mbi, &u);
                axpy(-c, bi, &mut u);
            }
        }
        let mu = m_apply(&u);
        let b = dot(&u, &mu).max(0.0).sqrt();

        let m = alpha.len();
        let check = m < 60 || m % 4 == 0 || m == max_steps || b == 0.0;
        if check {
            let mut t = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let mut idx = 0;
            for i in 1..m {
                let better = match which {
                    Extreme::Largest => eig.eigenvalues[i] > eig.eigenvalues[idx],
                    Extreme::Smallest => eig.eigenvalues[i] < eig.eigenvalues[idx],
                };
                if better {
                    idx = i;
                }
            }
            let theta = eig.eigenvalues[idx];
            let resid = (b * eig.eigenvectors[(m - 1, idx)]).abs();
            let rel = if theta != 0.0 {
                resid / theta.abs()
            } else {
                resid
            };
            best = EigEstimate {
                value: theta,
                rel_residual: rel,
                converged: rel <= opts.tol,
                steps: m,
            };
            if best.converged {
                return best;
            }
        }
        if b <= 1e-300 || !b.is_finite() {
            // invariant subspace found
            best.converged = b.is_finite();
            best.rel_residual = 0.0;
            return best;
        }
        beta.push(b);
        basis.push(u.iter().map(|x| x / b).collect());
        mbasis.push(mu.iter().map(|x| x / b).collect());
    }
    best
}

/// Extreme eigenvalue of a symmetric operator given by `apply`.
pub fn lanczos(
    n: usize,
    apply: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    which: Extreme,
    opts: LanczosOptions,
) -> EigEstimate {
    let mut ident = |x: &[f64]| x.to_vec();
    let mut ident2 = |x: &[f64]| x.to_vec();
    lanczos_pencil(n, apply, &mut ident, &mut ident2, which, opts)
}

/// How the smallest eigenvalue of a matrix is reached.
pub enum SmallestMode<'a> {
    /// Plain Lanczos on the matrix itself.
    Direct,
    /// Lanczos on the inverse; the closure applies `A⁻¹`.
    ShiftInvert(&'a mut dyn FnMut(&[f64]) -> Vec<f64>),
}

/// Largest eigenvalue of a symmetric sparse matrix.
pub fn largest_eig(a: &CsrMatrix, opts: LanczosOptions) -> EigEstimate {
    let mut ap = |x: &[f64]| a.mul_vec(x);
    lanczos(a.rows(), &mut ap, Extreme::Largest, opts)
}

/// Smallest eigenvalue of a symmetric positive definite sparse matrix.
pub fn smallest_eig(a: &CsrMatrix, mode: SmallestMode<'_>, opts: LanczosOptions) -> EigEstimate {
    match mode {
        SmallestMode::Direct => {
            let mut ap = |x: &[f64]| a.mul_vec(x);
            lanczos(a.rows(), &mut ap, Extreme::Smallest, opts)
        }
        SmallestMode::ShiftInvert(solve) => {
            let est = lanczos(a.rows(), solve, Extreme::Largest, opts);
            EigEstimate {
                value: 1.0 / est.value,
                ..est
            }
        }
    }
}
