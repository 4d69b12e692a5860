//! Galerkin assembly of `a(u, v) = ∫ ∇u·∇v` and `f(v) = ∫ f v` on a NURBS
//! patch, with Dirichlet elimination.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{analysis_weights, rational_1d, ManufacturedProblem, NurbsPatch};
use crate::linalg::{matrix_market, CsrMatrix, DenseLu};
use crate::splines::{Continuity, SplineSpace};

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Golub-Welsch).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one quadrature point");
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize to remove eigen-solver noise
    for i in 0..n / 2 {
        let (x, w) = ((pairs[n - 1 - i].0 - pairs[i].0) / 2.0, (pairs[i].1 + pairs[n - 1 - i].1) / 2.0);
        pairs[i] = (-x, w);
        pairs[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// Tensor-product analysis space: per-direction spline spaces plus the
/// per-direction weights of the rational basis.
#[derive(Clone, Debug)]
pub struct TensorSpace {
    spaces: Vec<SplineSpace>,
    weights: Vec<Vec<f64>>,
}

impl TensorSpace {
    /// Analysis space of degree `p` and continuity `r` at dyadic `level` in
    /// every direction of `patch`, carrying the patch's weight function.
    pub fn new(patch: &NurbsPatch, p: usize, r: Continuity, level: usize) -> Result<Self> {
        let spaces = (0..patch.dim())
            .map(|_| SplineSpace::new(p, r, level))
            .collect::<Result<Vec<_>>>()?;
        let weights = analysis_weights(patch, p, r, level)?;
        Ok(Self { spaces, weights })
    }

    /// Polynomial (unit-weight) tensor space.
    pub fn bspline(spaces: Vec<SplineSpace>) -> Self {
        let weights = spaces.iter().map(|s| vec![1.0; s.dim()]).collect();
        Self { spaces, weights }
    }

    pub fn spaces(&self) -> &[SplineSpace] {
        &self.spaces
    }
    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }
    pub fn dim(&self) -> usize {
        self.spaces.len()
    }
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(SplineSpace::dim).collect()
    }
    pub fn len(&self) -> usize {
        self.dims().iter().product()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn is_rational(&self) -> bool {
        self.weights.iter().flatten().any(|&w| w != 1.0)
    }

    pub fn eval_1d(&self, dir: usize, x: f64) -> Result<(usize, Vec<f64>, Vec<f64>)> {
        rational_1d(&self.spaces[dir], &self.weights[dir], x)
    }
}

fn multi_index(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for a in (0..dims.len()).rev() {
        idx[a] = flat % dims[a];
        flat /= dims[a];
    }
    idx
}

/// Tensor indices with any direction index first or last, ascending.
pub fn boundary_dofs(space: &TensorSpace) -> Vec<usize> {
    let dims = space.dims();
    (0..space.len())
        .filter(|&i| {
            multi_index(i, &dims)
                .iter()
                .zip(&dims)
                .any(|(&a, &m)| a == 0 || a + 1 == m)
        })
        .collect()
}

/// Complement of [`boundary_dofs`], ascending; equals the tensor product of
/// the per-direction interior ranges in the same ordering.
pub fn interior_dofs(space: &TensorSpace) -> Vec<usize> {
    let dims = space.dims();
    (0..space.len())
        .filter(|&i| {
            multi_index(i, &dims)
                .iter()
                .zip(&dims)
                .all(|(&a, &m)| a != 0 && a + 1 != m)
        })
        .collect()
}

/// Assembled system on the interior unknowns.
#[derive(Clone, Debug)]
pub struct DiscreteSystem {
    pub a: CsrMatrix,
    /// Load vector with the Dirichlet lift already subtracted.
    pub f: Vec<f64>,
    /// Full-space indices of the unknowns.
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
    /// Boundary coefficients interpolating the Dirichlet data.
    pub boundary_values: Vec<f64>,
    /// `A_ib u_b`, the part moved to the right-hand side.
    pub lift: Vec<f64>,
    pub full_dim: usize,
}

impl DiscreteSystem {
    /// Full coefficient vector from interior values.
    pub fn expand(&self, u_interior: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.full_dim];
        for (&i, &v) in self.interior.iter().zip(u_interior) {
            u[i] = v;
        }
        for (&i, &v) in self.boundary.iter().zip(&self.boundary_values) {
            u[i] = v;
        }
        u
    }

    /// Write `A` and `f` as Matrix Market files.
    pub fn export(&self, a_path: impl AsRef<Path>, f_path: impl AsRef<Path>) -> Result<()> {
        matrix_market::write_matrix(a_path, &self.a)?;
        matrix_market::write_vector(f_path, &self.f)
    }
}

/// Per-direction 1D coupling pattern: sorted neighbour lists.
fn pattern_1d(space: &SplineSpace) -> Vec<Vec<usize>> {
    let p = space.degree();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); space.dim()];
    for e in 0..space.n_spans() {
        let f = space.element_first_function(e);
        for i in f..=f + p {
            rows[i].extend(f..=f + p);
        }
    }
    for r in &mut rows {
        r.sort_unstable();
        r.dedup();
    }
    rows
}

/// Values and parametric derivatives of the active univariate functions at
/// every quadrature point of every element.
struct Tabulated {
    first: Vec<usize>,
    points: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
    vals: Vec<Vec<Vec<f64>>>,
    ders: Vec<Vec<Vec<f64>>>,
}

fn tabulate(space: &TensorSpace, dir: usize, nodes: &[f64], qw: &[f64]) -> Result<Tabulated> {
    let s = &space.spaces[dir];
    let h = s.h();
    let mut t = Tabulated {
        first: Vec::new(),
        points: Vec::new(),
        weights: Vec::new(),
        vals: Vec::new(),
        ders: Vec::new(),
    };
    for e in 0..s.n_spans() {
        let a = e as f64 * h;
        let (mut pts, mut ws, mut vs, mut ds) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (&x, &w) in nodes.iter().zip(qw) {
            let xi = a + h * (x + 1.0) / 2.0;
            let (first, v, d) = space.eval_1d(dir, xi)?;
            debug_assert_eq!(first, s.element_first_function(e));
            pts.push(xi);
            ws.push(w * h / 2.0);
            vs.push(v);
            ds.push(d);
        }
        t.first.push(s.element_first_function(e));
        t.points.push(pts);
        t.weights.push(ws);
        t.vals.push(vs);
        t.ders.push(ds);
    }
    Ok(t)
}

fn invert_small(j: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = j.len();
    let m = DMatrix::from_fn(d, d, |a, b| j[a][b]);
    let inv = m.try_inverse().unwrap_or_else(|| DMatrix::from_element(d, d, f64::NAN));
    (0..d).map(|a| (0..d).map(|b| inv[(a, b)]).collect()).collect()
}

/// Full-space stiffness matrix and load vector before any elimination.
pub fn assemble_full(
    patch: &NurbsPatch,
    space: &TensorSpace,
    source: impl Fn(&[f64]) -> f64,
    quad_order: usize,
) -> Result<(CsrMatrix, Vec<f64>)> {
    let d = space.dim();
    if d != patch.dim() {
        return Err(Error::DimensionMismatch {
            expected: patch.dim(),
            got: d,
            context: "space and patch dimensions",
        });
    }
    let p_max = space.spaces.iter().map(SplineSpace::degree).max().unwrap_or(1);
    if quad_order < p_max + 1 {
        return Err(Error::Config(format!(
            "quadrature order {quad_order} below p+1 = {}",
            p_max + 1
        )));
    }
    let (nodes, qw) = gauss_legendre(quad_order);
    let tabs: Vec<Tabulated> = (0..d)
        .map(|a| tabulate(space, a, &nodes, &qw))
        .collect::<Result<_>>()?;

    // tensor CSR pattern = kron of 1D patterns
    let pats: Vec<Vec<Vec<usize>>> = space.spaces.iter().map(pattern_1d).collect();
    let dims = space.dims();
    let n = space.len();
    let mut pat_mats = Vec::with_capacity(d);
    for (pat, &m) in pats.iter().zip(&dims) {
        let trips = pat
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&j| (i, j, 1.0)));
        pat_mats.push(CsrMatrix::from_triplets(m, m, trips)?);
    }
    let refs: Vec<&CsrMatrix> = pat_mats.iter().collect();
    let mut a = CsrMatrix::kron_all(&refs)?;
    a.values_mut().iter_mut().for_each(|v| *v = 0.0);
    let mut f = vec![0.0; n];

    // strides for positions within a row of the tensor pattern
    let widths: Vec<Vec<usize>> = pats.iter().map(|p| p.iter().map(Vec::len).collect()).collect();
    let offset = |dir: usize, i: usize, j: usize| -> usize {
        pats[dir][i].binary_search(&j).expect("coupled pair in pattern")
    };

    let n_el: Vec<usize> = space.spaces.iter().map(SplineSpace::n_spans).collect();
    let nq1 = nodes.len();
    let nq: usize = nq1.pow(d as u32);
    let nloc_dir: Vec<usize> = space.spaces.iter().map(|s| s.degree() + 1).collect();
    let nloc: usize = nloc_dir.iter().product();
    let total_el: usize = n_el.iter().product();

    let mut grad = DMatrix::<f64>::zeros(nloc, d * nq);
    let mut local_f = vec![0.0; nloc];
    let mut local_idx = vec![vec![0usize; d]; nloc];
    for el in 0..total_el {
        let e = multi_index(el, &n_el);
        local_f.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..nq {
            let qi = multi_index(q, &vec![nq1; d]);
            let xi: Vec<f64> = (0..d).map(|a| tabs[a].points[e[a]][qi[a]]).collect();
            let (x, jac) = patch.map_point(&xi)?;
            let det = crate::geometry::determinant(&jac);
            let jinv = invert_small(&jac);
            let wq: f64 = (0..d).map(|a| tabs[a].weights[e[a]][qi[a]]).product::<f64>() * det;
            let sw = wq.sqrt();
            let fx = source(&x);
            for l in 0..nloc {
                let li = multi_index(l, &nloc_dir);
                let mut val = 1.0;
                let mut g = [0.0f64; 3];
                for a in 0..d {
                    g[a] = 1.0;
                }
                for a in 0..d {
                    let v = tabs[a].vals[e[a]][qi[a]][li[a]];
                    let dv = tabs[a].ders[e[a]][qi[a]][li[a]];
                    val *= v;
                    for (b, gb) in g.iter_mut().enumerate().take(d) {
                        *gb *= if a == b { dv } else { v };
                    }
                }
                local_f[l] += wq * val * fx;
                // physical gradient: J^{-T} ∇ξ
                for c in 0..d {
                    let mut s = 0.0;
                    for b in 0..d {
                        s += jinv[b][c] * g[b];
                    }
                    grad[(l, q * d + c)] = sw * s;
                }
            }
        }
        let k_loc = &grad * grad.transpose();
        for l in 0..nloc {
            let li = multi_index(l, &nloc_dir);
            for a in 0..d {
                local_idx[l][a] = tabs[a].first[e[a]] + li[a];
            }
        }
        for l in 0..nloc {
            let gi = &local_idx[l];
            let row = gi.iter().zip(&dims).fold(0, |acc, (&i, &m)| acc * m + i);
            f[row] += local_f[l];
            let start = a.indptr()[row];
            for m in 0..nloc {
                let gj = &local_idx[m];
                let mut pos = 0;
                for dir in 0..d {
                    let stride: usize = (dir + 1..d).map(|b| widths[b][gi[b]]).product();
                    pos += offset(dir, gi[dir], gj[dir]) * stride;
                }
                a.values_mut()[start + pos] += k_loc[(l, m)];
            }
        }
    }
    Ok((a, f))
}

/// Coefficients interpolating `g ∘ x` at the tensor Greville points.
pub fn greville_interpolant(
    patch: &NurbsPatch,
    space: &TensorSpace,
    g: impl Fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    let d = space.dim();
    let dims = space.dims();
    let grev: Vec<Vec<f64>> = space.spaces.iter().map(SplineSpace::greville).collect();
    let mut lus = Vec::with_capacity(d);
    for a in 0..d {
        let m = dims[a];
        let mut c = DMatrix::<f64>::zeros(m, m);
        for (row, &x) in grev[a].iter().enumerate() {
            let (first, v, _) = space.eval_1d(a, x)?;
            for (k, &val) in v.iter().enumerate() {
                c[(row, first + k)] = val;
            }
        }
        lus.push(DenseLu::new(c)?);
    }
    let n = space.len();
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let mi = multi_index(i, &dims);
        let xi: Vec<f64> = (0..d).map(|a| grev[a][mi[a]]).collect();
        let (x, _) = patch.map_point(&xi)?;
        vals.push(g(&x));
    }
    // mode-wise solves with the univariate collocation matrices
    for a in 0..d {
        let stride: usize = dims[a + 1..].iter().product();
        let outer: usize = dims[..a].iter().product();
        let m = dims[a];
        let mut fiber = vec![0.0; m];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * m * stride + s;
                for k in 0..m {
                    fiber[k] = vals[base + k * stride];
                }
                let sol = lus[a].solve(&fiber);
                for k in 0..m {
                    vals[base + k * stride] = sol[k];
                }
            }
        }
    }
    Ok(vals)
}

/// Assemble with arbitrary source and Dirichlet data.
pub fn assemble_with(
    patch: &NurbsPatch,
    space: &TensorSpace,
    source: impl Fn(&[f64]) -> f64,
    dirichlet: impl Fn(&[f64]) -> f64,
    quad_order: usize,
) -> Result<DiscreteSystem> {
    let (full, f_full) = assemble_full(patch, space, source, quad_order)?;
    let interior = interior_dofs(space);
    let boundary = boundary_dofs(space);
    let coeffs = greville_interpolant(patch, space, dirichlet)?;
    let boundary_values: Vec<f64> = boundary.iter().map(|&i| coeffs[i]).collect();
    let a_ib = full.select(&interior, &boundary);
    let a = full.select(&interior, &interior);
    drop(full);
    let lift = a_ib.mul_vec(&boundary_values);
    let f = interior
        .iter()
        .zip(&lift)
        .map(|(&i, l)| f_full[i] - l)
        .collect();
    Ok(DiscreteSystem {
        a,
        f,
        interior,
        boundary,
        boundary_values,
        lift,
        full_dim: space.len(),
    })
}

/// Assemble `-Δu = f` for a manufactured problem.
pub fn assemble(
    patch: &NurbsPatch,
    space: &TensorSpace,
    problem: &ManufacturedProblem,
    quad_order: usize,
) -> Result<DiscreteSystem> {
    assemble_with(
        patch,
        space,
        |x| problem.source(x),
        |x| problem.dirichlet(x),
        quad_order,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_cube;

    #[test]
    fn gauss_integrates_polynomials() {
        let (x, w) = gauss_legendre(4);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert!((s - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn linear_fem_stencil() {
        let patch = unit_cube(1);
        let space = TensorSpace::bspline(vec![SplineSpace::with_spans(1, Continuity::Cpm1, 2).unwrap()]);
        let sys = assemble_with(&patch, &space, |_| 0.0, |_| 0.0, 2).unwrap();
        assert_eq!(sys.a.rows(), 1);
        assert!((sys.a.get(0, 0) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn boundary_counts() {
        let s = |n| SplineSpace::with_spans(2, Continuity::Cpm1, n).unwrap();
        let space = TensorSpace::bspline(vec![s(4), s(8)]);
        let (m1, m2) = (6, 10);
        assert_eq!(boundary_dofs(&space).len(), 2 * m1 + 2 * m2 - 4);
        let c0 = TensorSpace::bspline(vec![SplineSpace::with_spans(2, Continuity::C0, 4).unwrap()]);
        assert_eq!(boundary_dofs(&c0), vec![0, 8]);
    }
}
