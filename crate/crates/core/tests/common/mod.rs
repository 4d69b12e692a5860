//! Helpers shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use amli_iga::assembly::{assemble_with, TensorSpace};
use amli_iga::geometry::{analysis_weights, make_domain, Domain};
use amli_iga::linalg::CsrMatrix;
use amli_iga::splines::Continuity;
use amli_iga::transfer::{interior_1d, nurbs_restriction, restriction_1d};

/// Stiffness matrix on the interior unknowns of `domain` at `level`.
pub fn stiffness(domain: Domain, p: usize, r: Continuity, level: usize, quad: usize) -> CsrMatrix {
    let patch = make_domain(domain);
    let space = TensorSpace::new(&patch, p, r, level).unwrap();
    assemble_with(&patch, &space, |_| 0.0, |_| 0.0, quad).unwrap().a
}

/// `max |G_int A_k G_intᵀ - A_{k-1}| / max |A_{k-1}|`, with `R` in the
/// rational directions.
pub fn galerkin_defect(domain: Domain, p: usize, r: Continuity, k: usize, quad: usize) -> f64 {
    let patch = make_domain(domain);
    let fine = stiffness(domain, p, r, k, quad);
    let coarse = stiffness(domain, p, r, k - 1, quad);
    let g = restriction_1d(p, r, k).unwrap().g;
    let ints: Vec<CsrMatrix> = analysis_weights(&patch, p, r, k - 1)
        .unwrap()
        .iter()
        .map(|w| interior_1d(&nurbs_restriction(&g, w).unwrap()))
        .collect();
    let refs: Vec<&CsrMatrix> = ints.iter().collect();
    let g = CsrMatrix::kron_all(&refs).unwrap();
    let galerkin = CsrMatrix::triple_product(&g, &fine, &g).unwrap();
    let diff = galerkin.add(-1.0, &coarse).unwrap();
    diff.max_abs() / coarse.max_abs()
}

/// 2D five-point Laplacian on an `m × m` grid.
pub fn laplacian(m: usize) -> CsrMatrix {
    let idx = |i: usize, j: usize| i * m + j;
    let mut t = Vec::new();
    for i in 0..m {
        for j in 0..m {
            t.push((idx(i, j), idx(i, j), 4.0));
            if i > 0 {
                t.push((idx(i, j), idx(i - 1, j), -1.0));
            }
            if i + 1 < m {
                t.push((idx(i, j), idx(i + 1, j), -1.0));
            }
            if j > 0 {
                t.push((idx(i, j), idx(i, j - 1), -1.0));
            }
            if j + 1 < m {
                t.push((idx(i, j), idx(i, j + 1), -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(m * m, m * m, t).unwrap()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn scaled(rows: &[&[f64]], denom: f64) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(|v| v / denom).collect())
        .collect()
}

/// Printed `C^{p-1}` restriction matrices as `(p, k, G_k)`.
pub fn printed_smooth_operators() -> Vec<(usize, usize, Vec<Vec<f64>>)> {
    vec![
        (2, 2, scaled(&[&[4., 2., 0., 0.], &[0., 2., 2., 0.], &[0., 0., 2., 4.]], 4.)),
        (
            2,
            3,
            scaled(
                &[
                    &[4., 2., 0., 0., 0., 0.],
                    &[0., 2., 3., 1., 0., 0.],
                    &[0., 0., 1., 3., 2., 0.],
                    &[0., 0., 0., 0., 2., 4.],
                ],
                4.,
            ),
        ),
        (
            3,
            2,
            scaled(
                &[
                    &[2., 1., 0., 0., 0.],
                    &[0., 1., 1., 0., 0.],
                    &[0., 0., 1., 1., 0.],
                    &[0., 0., 0., 1., 2.],
                ],
                2.,
            ),
        ),
        (
            3,
            3,
            scaled(
                &[
                    &[16., 8., 0., 0., 0., 0., 0.],
                    &[0., 8., 12., 3., 0., 0., 0.],
                    &[0., 0., 4., 10., 4., 0., 0.],
                    &[0., 0., 0., 3., 12., 8., 0.],
                    &[0., 0., 0., 0., 0., 8., 16.],
                ],
                16.,
            ),
        ),
        (
            4,
            2,
            scaled(
                &[
                    &[2., 1., 0., 0., 0., 0.],
                    &[0., 1., 1., 0., 0., 0.],
                    &[0., 0., 1., 1., 0., 0.],
                    &[0., 0., 0., 1., 1., 0.],
                    &[0., 0., 0., 0., 1., 2.],
                ],
                2.,
            ),
        ),
        (
            4,
            3,
            scaled(
                &[
                    &[48., 24., 0., 0., 0., 0., 0., 0.],
                    &[0., 24., 36., 9., 0., 0., 0., 0.],
                    &[0., 0., 12., 30., 9., 0., 0., 0.],
                    &[0., 0., 0., 9., 30., 12., 0., 0.],
                    &[0., 0., 0., 0., 9., 36., 24., 0.],
                    &[0., 0., 0., 0., 0., 0., 24., 48.],
                ],
                48.,
            ),
        ),
    ]
}

/// Printed `C⁰` restriction matrices `G_2` as `(p, G_2)`.
pub fn printed_c0_operators() -> Vec<(usize, Vec<Vec<f64>>)> {
    vec![
        (2, scaled(&[&[4., 2., 1., 0., 0.], &[0., 2., 2., 2., 0.], &[0., 0., 1., 2., 4.]], 4.)),
        (
            3,
            scaled(
                &[
                    &[8., 4., 2., 1., 0., 0., 0.],
                    &[0., 4., 4., 3., 2., 0., 0.],
                    &[0., 0., 2., 3., 4., 4., 0.],
                    &[0., 0., 0., 1., 2., 4., 8.],
                ],
                8.,
            ),
        ),
        (
            4,
            scaled(
                &[
                    &[16., 8., 4., 2., 1., 0., 0., 0., 0.],
                    &[0., 8., 8., 6., 4., 2., 0., 0., 0.],
                    &[0., 0., 4., 6., 6., 6., 4., 0., 0.],
                    &[0., 0., 0., 2., 4., 6., 8., 8., 0.],
                    &[0., 0., 0., 0., 1., 2., 4., 8., 16.],
                ],
                16.,
            ),
        ),
    ]
}

/// Interior `C^{p-1}` stencils as `(p, denominator, numerators)`.
pub fn printed_smooth_stencils() -> Vec<(usize, f64, &'static [f64])> {
    vec![
        (2, 4., &[1., 3., 3., 1.]),
        (3, 16., &[2., 8., 12., 8., 2.]),
        (4, 48., &[3., 15., 30., 30., 15., 3.]),
    ]
}
