//! Hierarchical complements, the two-level basis transformation
//! `J = [T; G]` and the splitting quality measures `γ²` and `κ(Â₁₁)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{analysis_weights, Domain, NurbsPatch};
use crate::linalg::dense::{min_singular_value, to_dmatrix};
use crate::linalg::{
    lanczos, lanczos_pencil, pcg, CsrMatrix, EigEstimate, Extreme, Ilu0, LanczosOptions,
};
use crate::splines::Continuity;
use crate::transfer::{interior_1d, nurbs_restriction, restriction_1d};

/// Which of the two tabulated complement families to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    First,
    Second,
}

impl Choice {
    pub fn number(self) -> u8 {
        match self {
            Choice::First => 1,
            Choice::Second => 2,
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for Choice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "first" => Ok(Choice::First),
            "2" | "second" => Ok(Choice::Second),
            other => Err(Error::Config(format!("unknown complement choice '{other}'"))),
        }
    }
}

/// Multiplicative or additive two-level preconditioner form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Multiplicative,
    Additive,
}

#[derive(Clone, Debug)]
pub struct ComplementOperator {
    pub t: CsrMatrix,
    pub choice: Choice,
    pub p: usize,
    pub r: Continuity,
    pub k: usize,
}

const H: f64 = 0.5;
const Q: f64 = 0.25;
const E: f64 = 0.125;

fn block(p: usize, r: Continuity, choice: Choice) -> Result<Vec<Vec<f64>>> {
    use Choice::*;
    use Continuity::*;
    let rows: Vec<Vec<f64>> = match (p, r, choice) {
        (2, Cpm1, First) => vec![vec![0., 1., -1., 0., 0., 0.], vec![0., 0., 0., 1., -1., 0.]],
        (3, Cpm1, First) => vec![
            vec![0., -H, 0.75, -H, 0., 0., 0.],
            vec![0., 0., 0., -H, 0.75, -H, 0.],
        ],
        (4, Cpm1, First) => vec![
            vec![0., H, -1., 1., -H, 0., 0., 0.],
            vec![0., 0., 0., H, -1., 1., -H, 0.],
        ],
        (2, Cpm1, Second) => vec![vec![-H, 1., -1., H, 0., 0.], vec![0., 0., -H, 1., -1., H]],
        (3, Cpm1, Second) => vec![
            vec![E, -H, 0.75, -H, E, 0., 0.],
            vec![0., 0., E, -H, 0.75, -H, E],
        ],
        (4, Cpm1, Second) => {
            return Err(Error::Unsupported(
                "second complement choice for degree 4 with maximal smoothness".into(),
            ))
        }
        (2, C0, First) => vec![vec![0., 1., -Q, 0., 0.], vec![0., 0., -Q, 1., 0.]],
        (3, C0, First) => vec![
            vec![0., 1., -1., 0., 0., 0., 0.],
            vec![0., 0., 0., H, -H, 0., 0.],
            vec![0., 0., 0., 0., 1., -1., 0.],
        ],
        (4, C0, First) => {
            let (a, b) = (-2.0 / 3.0, 1.25);
            vec![
                vec![0., a, b, 0., 0., 0., 0., 0., 0.],
                vec![0., 0., a, b, 0., 0., 0., 0., 0.],
                vec![0., 0., 0., 0., 0., b, a, 0., 0.],
                vec![0., 0., 0., 0., 0., 0., b, a, 0.],
            ]
        }
        (2, C0, Second) => vec![vec![-Q, 1., -Q, 0., 0.], vec![0., 0., -Q, 1., -Q]],
        (3, C0, Second) => vec![
            vec![0., -H, H, 0., 0., 0., 0.],
            vec![0., 0., -Q, 0.1, -Q, 0., 0.],
            vec![0., 0., 0., 0., H, -H, 0.],
        ],
        (4, C0, Second) => {
            let a = -5.0 / 9.0;
            vec![
                vec![0., a, 1., a, 0., 0., 0., 0., 0.],
                vec![0., 0., a, 1., a, 0., 0., 0., 0.],
                vec![0., 0., 0., 0., a, 1., a, 0., 0.],
                vec![0., 0., 0., 0., 0., a, 1., a, 0.],
            ]
        }
        _ => return Err(Error::Unsupported(format!("complement for degree {p}"))),
    };
    Ok(rows)
}

/// Complement operator `T` of shape `(dim V_k - dim V_{k-1}) × dim V_k`.
///
/// Maximal smoothness: two-row blocks of width `p+4`, the next block four
/// columns to the right. `C⁰`: `p`-row blocks of width `2p+1` sharing one
/// column with the next block.
pub fn complement_1d(p: usize, r: Continuity, k: usize, choice: Choice) -> Result<ComplementOperator> {
    if !(2..=30).contains(&k) {
        return Err(Error::Unsupported(format!("complement at fine level {k}")));
    }
    let blk = block(p, r, choice)?;
    let n_f = 1usize << (k - 1);
    let n_c = n_f / 2;
    let (mf, mc, width, advance) = match r {
        Continuity::Cpm1 => (n_f + p, n_c + p, p + 4, 4),
        Continuity::C0 => (p * n_f + 1, p * n_c + 1, 2 * p + 1, 2 * p),
    };
    let mut trips = Vec::new();
    let mut row = 0;
    let mut col = 0;
    while col + width <= mf {
        for br in &blk {
            for (c, &v) in br.iter().take(width).enumerate() {
                if v != 0.0 {
                    trips.push((row, col + c, v));
                }
            }
            row += 1;
        }
        col += advance;
    }
    if row != mf - mc {
        return Err(Error::Unsupported(format!(
            "complement blocks do not tile level {k} (p={p}, {r}): {row} rows for {} needed",
            mf - mc
        )));
    }
    let t = CsrMatrix::from_triplets(row, mf, trips)?;
    Ok(ComplementOperator { t, choice, p, r, k })
}

/// Two-level transformation split into complement rows `jc` and coarse rows
/// `jg = ⊗ G_int`, so `J = [jc; jg]`.
#[derive(Clone, Debug)]
pub struct Transform {
    pub jc: CsrMatrix,
    pub jg: CsrMatrix,
    /// Positions of the `jc` rows within the Kronecker ordering of `⊗ [T; G]`.
    pub complement_rows: Vec<usize>,
    pub coarse_rows: Vec<usize>,
    /// Smallest singular value over the per-direction stacks.
    pub sigma_min: f64,
}

impl Transform {
    pub fn dim(&self) -> usize {
        self.jc.cols()
    }
    pub fn coarse_count(&self) -> usize {
        self.jg.rows()
    }

    /// Square `J` with complement rows first.
    pub fn j(&self) -> CsrMatrix {
        CsrMatrix::vstack(&[&self.jc, &self.jg]).expect("conforming blocks")
    }
}

/// Kronecker product of the per-direction stacks `[T_int; G_int]`, rows
/// reordered so that every row with a complement factor precedes the pure
/// coarse rows.
pub fn build_transform(g_int: &[CsrMatrix], t_int: &[CsrMatrix]) -> Result<Transform> {
    if g_int.len() != t_int.len() || g_int.is_empty() {
        return Err(Error::Splitting("one G and one T per direction".into()));
    }
    let mut stacks = Vec::with_capacity(g_int.len());
    let mut sigma_min = f64::INFINITY;
    for (g, t) in g_int.iter().zip(t_int) {
        let j = CsrMatrix::vstack(&[t, g])?;
        if j.rows() != j.cols() {
            return Err(Error::Splitting(format!(
                "[T; G] is {}×{}, not square",
                j.rows(),
                j.cols()
            )));
        }
        let s = min_singular_value(&to_dmatrix(&j));
        if !(s > 1e-8) {
            return Err(Error::Splitting(format!("[T; G] rank deficient (σ_min = {s:e})")));
        }
        sigma_min = sigma_min.min(s);
        stacks.push(j);
    }
    let dims: Vec<usize> = stacks.iter().map(CsrMatrix::rows).collect();
    let nts: Vec<usize> = t_int.iter().map(CsrMatrix::rows).collect();
    let n: usize = dims.iter().product();
    let mut complement_rows = Vec::new();
    let mut coarse_rows = Vec::new();
    for i in 0..n {
        let mut rem = i;
        let mut any_t = false;
        for a in (0..dims.len()).rev() {
            if rem % dims[a] < nts[a] {
                any_t = true;
            }
            rem /= dims[a];
        }
        if any_t {
            complement_rows.push(i);
        } else {
            coarse_rows.push(i);
        }
    }
    let refs: Vec<&CsrMatrix> = stacks.iter().collect();
    let full = CsrMatrix::kron_all(&refs)?;
    let jc = full.select_rows(&complement_rows);
    drop(full);
    let grefs: Vec<&CsrMatrix> = g_int.iter().collect();
    let jg = CsrMatrix::kron_all(&grefs)?;
    Ok(Transform {
        jc,
        jg,
        complement_rows,
        coarse_rows,
        sigma_min,
    })
}

/// Blocks of `Â = J A Jᵀ`; `Â₂₁` is `Â₁₂ᵀ` and not stored.
#[derive(Clone, Debug)]
pub struct HierarchicalBlocks {
    pub a11: CsrMatrix,
    pub a12: CsrMatrix,
    pub a22: CsrMatrix,
}

impl HierarchicalBlocks {
    pub fn a21(&self) -> CsrMatrix {
        self.a12.transpose()
    }
    pub fn n1(&self) -> usize {
        self.a11.rows()
    }
    pub fn n2(&self) -> usize {
        self.a22.rows()
    }
}

pub fn hb_blocks(a: &CsrMatrix, t: &Transform) -> Result<HierarchicalBlocks> {
    Ok(HierarchicalBlocks {
        a11: CsrMatrix::triple_product(&t.jc, a, &t.jc)?,
        a12: CsrMatrix::triple_product(&t.jc, a, &t.jg)?,
        a22: CsrMatrix::triple_product(&t.jg, a, &t.jg)?,
    })
}

/// Blocks from an arbitrary square `J` whose last `coarse_count` rows span
/// the coarse space.
pub fn hb_blocks_from_j(a: &CsrMatrix, j: &CsrMatrix, coarse_count: usize) -> Result<HierarchicalBlocks> {
    let n = j.rows();
    if coarse_count > n {
        return Err(Error::Splitting("coarse count exceeds dimension".into()));
    }
    let jc = j.select_rows(&(0..n - coarse_count).collect::<Vec<_>>());
    let jg = j.select_rows(&(n - coarse_count..n).collect::<Vec<_>>());
    Ok(HierarchicalBlocks {
        a11: CsrMatrix::triple_product(&jc, a, &jc)?,
        a12: CsrMatrix::triple_product(&jc, a, &jg)?,
        a22: CsrMatrix::triple_product(&jg, a, &jg)?,
    })
}

/// Per-direction transfer data between levels `k-1` and `k`.
#[derive(Clone, Debug)]
pub struct LevelTransfer {
    /// Full restriction per direction (`R` when the direction is rational).
    pub restriction: Vec<CsrMatrix>,
    pub complement: Vec<CsrMatrix>,
    pub transform: Transform,
}

/// Build `G`/`R`, `T` and `J` for the analysis spaces of `patch` between
/// dyadic levels `k-1` and `k`.
pub fn level_transfer(
    patch: &NurbsPatch,
    p: usize,
    r: Continuity,
    k: usize,
    choice: Choice,
) -> Result<LevelTransfer> {
    let w_coarse = analysis_weights(patch, p, r, k - 1)?;
    let g = restriction_1d(p, r, k)?.g;
    let t = complement_1d(p, r, k, choice)?.t;
    let mut restriction = Vec::with_capacity(patch.dim());
    let mut g_int = Vec::with_capacity(patch.dim());
    let mut t_int = Vec::with_capacity(patch.dim());
    let cols: Vec<usize> = (1..t.cols() - 1).collect();
    let rows: Vec<usize> = (0..t.rows()).collect();
    for w in &w_coarse {
        let op = if w.iter().all(|&v| v == 1.0) {
            g.clone()
        } else {
            nurbs_restriction(&g, w)?
        };
        g_int.push(interior_1d(&op));
        let ti = t.select(&rows, &cols);
        if (0..ti.rows()).any(|i| ti.row(i).0.is_empty()) {
            return Err(Error::Splitting("complement row lost at the boundary".into()));
        }
        t_int.push(ti);
        restriction.push(op);
    }
    let transform = build_transform(&g_int, &t_int)?;
    Ok(LevelTransfer {
        restriction,
        complement: vec![t; patch.dim()],
        transform,
    })
}

/// Applies `Â₂₂⁻¹` (approximately) for the CBS eigenproblem.
pub type BlockSolver<'a> = &'a mut dyn FnMut(&[f64]) -> Vec<f64>;

const INNER_TOL: f64 = 1e-10;
const INNER_MAX_IT: usize = 2000;

fn ilu_pcg_solver(a: &CsrMatrix) -> Result<impl FnMut(&[f64]) -> Vec<f64> + '_> {
    let ilu = Ilu0::new(a)?;
    Ok(move |b: &[f64]| {
        let mut pre = |r: &[f64], z: &mut [f64]| ilu.apply(r, z);
        pcg(a, &mut pre, b, INNER_TOL, INNER_MAX_IT).0
    })
}

/// `γ² = λ_max(Â₂₂⁻¹ Â₂₁ Â₁₁⁻¹ Â₁₂)`, the squared CBS constant.
///
/// `a22_solve` defaults to ILU(0)-preconditioned CG on `Â₂₂`.
pub fn cbs_gamma_sq(
    blocks: &HierarchicalBlocks,
    a22_solve: Option<BlockSolver<'_>>,
    opts: LanczosOptions,
) -> Result<EigEstimate> {
    if blocks.a12.nnz() == 0 {
        return Ok(EigEstimate {
            value: 0.0,
            rel_residual: 0.0,
            converged: true,
            steps: 0,
        });
    }
    let mut a11_solve = ilu_pcg_solver(&blocks.a11)?;
    let mut k_apply = |v: &[f64]| {
        let y = blocks.a12.mul_vec(v);
        let z = a11_solve(&y);
        blocks.a12.mul_vec_transpose(&z)
    };
    let mut m_apply = |v: &[f64]| blocks.a22.mul_vec(v);
    let est = match a22_solve {
        Some(solve) => lanczos_pencil(blocks.n2(), &mut k_apply, &mut m_apply, solve, Extreme::Largest, opts),
        None => {
            let mut own = ilu_pcg_solver(&blocks.a22)?;
            lanczos_pencil(blocks.n2(), &mut k_apply, &mut m_apply, &mut own, Extreme::Largest, opts)
        }
    };
    Ok(est)
}

/// Spectral condition number of `Â₁₁` with the extreme eigenvalue estimates.
pub fn cond_a11(blocks: &HierarchicalBlocks, opts: LanczosOptions) -> Result<(f64, EigEstimate, EigEstimate)> {
    let a = &blocks.a11;
    let mut ap = |x: &[f64]| a.mul_vec(x);
    let hi = lanczos(a.rows(), &mut ap, Extreme::Largest, opts);
    let mut solve = ilu_pcg_solver(a)?;
    let inv = lanczos(a.rows(), &mut solve, Extreme::Largest, opts);
    let lo = EigEstimate {
        value: 1.0 / inv.value,
        ..inv
    };
    Ok((hi.value / lo.value, hi, lo))
}

/// Open interval of admissible ν: multiplicative `(1/√(1-γ²), τ)`, additive
/// `(√((1+γ)/(1-γ)), τ)`.
pub fn optimality_range(gamma_sq: f64, tau: f64, form: Form) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&gamma_sq) {
        return Err(Error::Config(format!("γ² = {gamma_sq} outside [0, 1)")));
    }
    if !(tau > 1.0) {
        return Err(Error::Config(format!("τ = {tau} must exceed 1")));
    }
    let lower = match form {
        Form::Multiplicative => 1.0 / (1.0 - gamma_sq).sqrt(),
        Form::Additive => {
            let g = gamma_sq.sqrt();
            ((1.0 + g) / (1.0 - g)).sqrt()
        }
    };
    if lower >= tau {
        return Err(Error::Splitting(format!(
            "no optimal ν: lower bound {lower:.4} ≥ τ = {tau:.4}"
        )));
    }
    Ok((lower, tau))
}

/// Integers strictly inside `(lower, upper)`.
pub fn admissible_nu(lower: f64, upper: f64) -> Vec<usize> {
    let start = lower.floor() as usize + 1;
    (start..).take_while(|&n| (n as f64) < upper).collect()
}

/// One row of a splitting-quality table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityRecord {
    pub domain: Domain,
    pub p: usize,
    pub r: Continuity,
    pub choice: Choice,
    pub one_over_h: usize,
    pub gamma_sq: f64,
    pub kappa_a11: f64,
}

pub fn write_quality_csv<W: Write>(out: W, records: &[QualityRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts_match_dimensions() {
        for p in 2..=4 {
            for r in [Continuity::C0, Continuity::Cpm1] {
                for k in 3..=7 {
                    for ch in [Choice::First, Choice::Second] {
                        match complement_1d(p, r, k, ch) {
                            Ok(op) => {
                                let g = restriction_1d(p, r, k).unwrap().g;
                                assert_eq!(op.t.rows() + g.rows(), g.cols());
                            }
                            Err(Error::Unsupported(_)) => {
                                assert!(p == 4 && r == Continuity::Cpm1 && ch == Choice::Second)
                            }
                            Err(e) => panic!("{e}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn optimality_arithmetic() {
        let (lo, hi) = optimality_range(0.19, 4.0, Form::Multiplicative).unwrap();
        assert!((lo - 1.0 / 0.81f64.sqrt()).abs() < 1e-15);
        assert_eq!(admissible_nu(lo, hi), vec![2, 3]);
        let (lo, hi) = optimality_range(0.75, 4.0, Form::Multiplicative).unwrap();
        assert_eq!(admissible_nu(lo, hi), vec![3]);
        assert!(optimality_range(0.99, 4.0, Form::Multiplicative).is_err());
    }
}
