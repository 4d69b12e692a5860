//! Preconditioned and flexible conjugate gradient drivers.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::sparse::{axpy, dot, norm2, CsrMatrix};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n_it: usize,
    /// `‖r_i‖ / ‖r_0‖` after each iteration.
    pub rel_residuals: Vec<f64>,
    /// Average convergence factor `(‖r_it‖/‖r_0‖)^(1/n_it)`.
    pub rho: f64,
    pub converged: bool,
    /// Setup wall time in seconds.
    pub t_c: f64,
    /// Solve wall time in seconds.
    pub t_s: f64,
}

impl SolveReport {
    fn finish(history: Vec<f64>, converged: bool) -> Self {
        let n_it = history.len();
        let rho = match history.last() {
            Some(&last) if n_it > 0 => last.powf(1.0 / n_it as f64),
            _ => 0.0,
        };
        Self {
            n_it,
            rel_residuals: history,
            rho,
            converged,
            t_c: 0.0,
            t_s: 0.0,
        }
    }
}

/// Preconditioned conjugate gradients from a zero initial guess.
pub fn pcg(
    a: &CsrMatrix,
    precond: &mut dyn FnMut(&[f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_it: usize,
) -> (Vec<f64>, SolveReport) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = norm2(&r);
    if r0 == 0.0 {
        return (x, SolveReport::finish(Vec::new(), true));
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut hist = Vec::new();
    let mut converged = false;
    for _ in 0..max_it {
        a.spmv(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        let rel = norm2(&r) / r0;
        hist.push(rel);
        if rel <= tol {
            converged = true;
            break;
        }
        if !rel.is_finite() {
            break;
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    (x, SolveReport::finish(hist, converged))
}

/// Extreme Ritz values of `M⁻¹A` from the Lanczos tridiagonal implied by
/// `steps` PCG iterations on `A x = b`.
pub fn pcg_ritz_bounds(
    a: &CsrMatrix,
    precond: &mut dyn FnMut(&[f64], &mut [f64]),
    b: &[f64],
    steps: usize,
) -> (f64, f64) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    for _ in 0..steps.min(n) {
        a.spmv(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) || !(rz > 0.0) {
            break;
        }
        let alpha = rz / pq;
        alphas.push(alpha);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        if !(beta > 0.0) || !beta.is_finite() {
            break;
        }
        betas.push(beta);
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let m = alphas.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut t = nalgebra::DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = 1.0 / alphas[j] + if j > 0 { betas[j - 1] / alphas[j - 1] } else { 0.0 };
        if j + 1 < m {
            let off = betas[j].sqrt() / alphas[j];
            t[(j, j + 1)] = off;
            t[(j + 1, j)] = off;
        }
    }
    let ev = nalgebra::SymmetricEigen::new(t).eigenvalues;
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Truncated flexible CG: each new direction is `A`-orthogonalized against
/// the last `m` directions, so the preconditioner may vary between steps.
pub fn fcg(
    a: &CsrMatrix,
    precond: &mut dyn FnMut(&[f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_it: usize,
    m: usize,
) -> (Vec<f64>, SolveReport) {
    let (x, hist, converged) = fcg_core(a, precond, b, Some(tol), max_it, m);
    (x, SolveReport::finish(hist, converged))
}

/// Exactly `iters` FCG steps (fewer only if the residual vanishes), used as
/// the inner solver of the nonlinear cycle.
pub fn fcg_fixed(
    a: &CsrMatrix,
    precond: &mut dyn FnMut(&[f64], &mut [f64]),
    b: &[f64],
    iters: usize,
    m: usize,
) -> Vec<f64> {
    fcg_core(a, precond, b, None, iters, m).0
}

fn fcg_core(
    a: &CsrMatrix,
    precond: &mut dyn FnMut(&[f64], &mut [f64]),
    b: &[f64],
    tol: Option<f64>,
    max_it: usize,
    m: usize,
) -> (Vec<f64>, Vec<f64>, bool) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = norm2(&r);
    if r0 == 0.0 {
        return (x, Vec::new(), true);
    }
    let mut z = vec![0.0; n];
    let mut dirs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut hist = Vec::new();
    let mut converged = false;
    for _ in 0..max_it {
        precond(&r, &mut z);
        let mut d = z.clone();
        for (dj, qj, djqj) in &dirs {
            let c = dot(&z, qj) / djqj;
            axpy(-c, dj, &mut d);
        }
        let mut q = vec![0.0; n];
        a.spmv(&d, &mut q);
        let dq = dot(&d, &q);
        if dq <= 0.0 || !dq.is_finite() {
            break;
        }
        let alpha = dot(&d, &r) / dq;
        axpy(alpha, &d, &mut x);
        axpy(-alpha, &q, &mut r);
        let rel = norm2(&r) / r0;
        hist.push(rel);
        if let Some(t) = tol {
            if rel <= t {
                converged = true;
                break;
            }
        }
        if rel == 0.0 {
            converged = true;
            break;
        }
        if m > 0 {
            if dirs.len() == m {
                dirs.pop_front();
            }
            dirs.push_back((d, q, dq));
        }
    }
    (x, hist, converged)
}
