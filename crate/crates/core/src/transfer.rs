//! Coarse-to-fine restriction operators: `B_{k-1} = G B_k` for B-splines and
//! `N_{k-1} = R N_k` for NURBS, plus weight refinement and tensorization.

use crate::error::{check_dim, Error, Result};
use crate::linalg::CsrMatrix;
use crate::splines::Continuity;

/// Restriction operator between two consecutive dyadic levels.
#[derive(Clone, Debug)]
pub struct RestrictionOperator {
    pub g: CsrMatrix,
    pub p: usize,
    pub r: Continuity,
    /// Fine level (the coarse level is `k - 1`).
    pub k: usize,
}

/// A row segment `values / denom` starting at column `start`.
struct Row {
    start: usize,
    values: Vec<f64>,
}

impl Row {
    fn new(start: usize, values: &[f64]) -> Self {
        Self {
            start,
            values: values.to_vec(),
        }
    }
}

// boundary rows of the C^{p-1} operators (times the common denominator)
const CP2_TOP: [&[f64]; 2] = [&[4.0, 2.0], &[2.0, 3.0, 1.0]];
const CP3_TOP: [&[f64]; 3] = [&[16.0, 8.0], &[8.0, 12.0, 3.0], &[4.0, 11.0, 8.0, 2.0]];
const CP4_TOP: [&[f64]; 4] = [
    &[48.0, 24.0],
    &[24.0, 36.0, 9.0],
    &[12.0, 33.0, 20.0, 4.0],
    &[6.0, 25.0, 29.0, 15.0, 3.0],
];
const CP2_MID: &[f64] = &[1.0, 3.0, 3.0, 1.0];
const CP3_MID: &[f64] = &[2.0, 8.0, 12.0, 8.0, 2.0];
const CP4_MID: &[f64] = &[3.0, 15.0, 30.0, 30.0, 15.0, 3.0];

// three-span coarse spaces, where boundary rows of both ends interact
const CP3_K3: [(usize, &[f64]); 5] = [
    (0, &[16.0, 8.0]),
    (1, &[8.0, 12.0, 3.0]),
    (2, &[4.0, 10.0, 4.0]),
    (3, &[3.0, 12.0, 8.0]),
    (5, &[8.0, 16.0]),
];
const CP4_K3: [(usize, &[f64]); 6] = [
    (0, &[48.0, 24.0]),
    (1, &[24.0, 36.0, 9.0]),
    (2, &[12.0, 30.0, 9.0]),
    (3, &[9.0, 30.0, 12.0]),
    (4, &[9.0, 36.0, 24.0]),
    (6, &[24.0, 48.0]),
];

// level-2 C0 blocks, replicated with a single shared corner entry
const C0P2_BLOCK: [&[f64]; 3] = [
    &[4.0, 2.0, 1.0, 0.0, 0.0],
    &[0.0, 2.0, 2.0, 2.0, 0.0],
    &[0.0, 0.0, 1.0, 2.0, 4.0],
];
const C0P3_BLOCK: [&[f64]; 4] = [
    &[8.0, 4.0, 2.0, 1.0, 0.0, 0.0, 0.0],
    &[0.0, 4.0, 4.0, 3.0, 2.0, 0.0, 0.0],
    &[0.0, 0.0, 2.0, 3.0, 4.0, 4.0, 0.0],
    &[0.0, 0.0, 0.0, 1.0, 2.0, 4.0, 8.0],
];
const C0P4_BLOCK: [&[f64]; 5] = [
    &[16.0, 8.0, 4.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    &[0.0, 8.0, 8.0, 6.0, 4.0, 2.0, 0.0, 0.0, 0.0],
    &[0.0, 0.0, 4.0, 6.0, 6.0, 6.0, 4.0, 0.0, 0.0],
    &[0.0, 0.0, 0.0, 2.0, 4.0, 6.0, 8.0, 8.0, 0.0],
    &[0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0],
];

fn rows_to_csr(n_rows: usize, n_cols: usize, rows: &[Row], denom: f64) -> Result<CsrMatrix> {
    let mut trips = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for (m, &v) in row.values.iter().enumerate() {
            if v != 0.0 {
                trips.push((i, row.start + m, v / denom));
            }
        }
    }
    check_dim(n_rows, rows.len(), "restriction row count")?;
    CsrMatrix::from_triplets(n_rows, n_cols, trips)
}

fn smooth_operator(p: usize, n_c: usize) -> Result<CsrMatrix> {
    let n_f = 2 * n_c;
    let (mc, mf) = (n_c + p, n_f + p);
    if n_c == 1 {
        // single coarse span: one knot inserted into a Bézier segment
        let denom = if p == 2 { 4.0 } else { 2.0 };
        let (first, mid, last): (&[f64], &[f64], &[f64]) = if p == 2 {
            (&[4.0, 2.0], &[2.0, 2.0], &[2.0, 4.0])
        } else {
            (&[2.0, 1.0], &[1.0, 1.0], &[1.0, 2.0])
        };
        let mut rows = vec![Row::new(0, first)];
        for r in 1..p {
            rows.push(Row::new(r, mid));
        }
        rows.push(Row::new(p, last));
        return rows_to_csr(mc, mf, &rows, denom);
    }
    if n_c < p {
        let (table, denom): (&[(usize, &[f64])], f64) = match p {
            3 => (&CP3_K3, 16.0),
            _ => (&CP4_K3, 48.0),
        };
        let rows: Vec<Row> = table.iter().map(|&(start, v)| Row::new(start, v)).collect();
        return rows_to_csr(mc, mf, &rows, denom);
    }
    let (top, mid, denom): (&[&[f64]], &[f64], f64) = match p {
        2 => (&CP2_TOP, CP2_MID, 4.0),
        3 => (&CP3_TOP, CP3_MID, 16.0),
        _ => (&CP4_TOP, CP4_MID, 48.0),
    };
    let mut rows = Vec::with_capacity(mc);
    for (r, &values) in top.iter().enumerate() {
        rows.push(Row::new(r, values));
    }
    for i in p..n_c {
        rows.push(Row::new(2 * i - p, mid));
    }
    for r in (0..p).rev() {
        let values: Vec<f64> = top[r].iter().rev().copied().collect();
        rows.push(Row::new(mf - r - values.len(), &values));
    }
    rows_to_csr(mc, mf, &rows, denom)
}

fn c0_operator(p: usize, n_c: usize) -> Result<CsrMatrix> {
    let (block, denom): (&[&[f64]], f64) = match p {
        2 => (&C0P2_BLOCK, 4.0),
        3 => (&C0P3_BLOCK, 8.0),
        _ => (&C0P4_BLOCK, 16.0),
    };
    let (mc, mf) = (p * n_c + 1, 2 * p * n_c + 1);
    let mut dense_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mc];
    for b in 0..n_c {
        for (r, vals) in block.iter().enumerate() {
            let row = p * b + r;
            for (c, &v) in vals.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let col = 2 * p * b + c;
                // the shared corner of consecutive blocks is stored once
                if !dense_rows[row].iter().any(|&(j, _)| j == col) {
                    dense_rows[row].push((col, v / denom));
                }
            }
        }
    }
    let trips = dense_rows
        .into_iter()
        .enumerate()
        .flat_map(|(i, r)| r.into_iter().map(move |(j, v)| (i, j, v)));
    CsrMatrix::from_triplets(mc, mf, trips)
}

/// Restriction `G` from level `k` (fine) to level `k-1`, of shape
/// `dim(V_{k-1}) × dim(V_k)`.
pub fn restriction_1d(p: usize, r: Continuity, k: usize) -> Result<RestrictionOperator> {
    if !(2..=4).contains(&p) {
        return Err(Error::Unsupported(format!("restriction for degree {p}")));
    }
    if !(2..=30).contains(&k) {
        return Err(Error::Unsupported(format!("restriction to fine level {k}")));
    }
    let n_c = 1usize << (k - 2);
    let g = match r {
        Continuity::Cpm1 => smooth_operator(p, n_c)?,
        Continuity::C0 => c0_operator(p, n_c)?,
    };
    Ok(RestrictionOperator { g, p, r, k })
}

/// Fine weights `W^k = Gᵀ W^{k-1}`.
pub fn refine_weights(g: &CsrMatrix, w_coarse: &[f64]) -> Result<Vec<f64>> {
    check_dim(g.rows(), w_coarse.len(), "coarse weight count")?;
    Ok(g.mul_vec_transpose(w_coarse))
}

/// NURBS restriction `r_ij = w_i^{k-1} g_ij / w_j^k`.
pub fn nurbs_restriction(g: &CsrMatrix, w_coarse: &[f64]) -> Result<CsrMatrix> {
    let w_fine = refine_weights(g, w_coarse)?;
    if let Some(j) = w_fine.iter().position(|&w| w <= 0.0) {
        return Err(Error::Domain(format!("nonpositive refined weight at {j}")));
    }
    let inv: Vec<f64> = w_fine.iter().map(|w| 1.0 / w).collect();
    Ok(g.scale_rows_cols(w_coarse, &inv))
}

/// Kronecker product of per-direction operators (first direction slowest).
pub fn tensorize(ops: &[&CsrMatrix]) -> Result<CsrMatrix> {
    CsrMatrix::kron_all(ops)
}

/// Keep only the given interior rows and columns.
pub fn restrict_interior(
    op: &CsrMatrix,
    coarse_interior: &[usize],
    fine_interior: &[usize],
) -> CsrMatrix {
    op.select(coarse_interior, fine_interior)
}

/// Drop the first and last row and column of a univariate operator.
pub fn interior_1d(op: &CsrMatrix) -> CsrMatrix {
    let rows: Vec<usize> = (1..op.rows().saturating_sub(1)).collect();
    let cols: Vec<usize> = (1..op.cols().saturating_sub(1)).collect();
    op.select(&rows, &cols)
}
