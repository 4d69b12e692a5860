use crate::error::{check_dim, Error, Result};

/// Entries with magnitude below this are dropped after sparse products.
pub const PRUNE_TOL: f64 = 1e-15;

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

/// Dense scatter accumulator used by the row-by-row product kernels.
struct Accumulator {
    vals: Vec<f64>,
    used: Vec<bool>,
    touched: Vec<u32>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Self {
            vals: vec![0.0; n],
            used: vec![false; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    fn add(&mut self, j: u32, v: f64) {
        let ju = j as usize;
        if !self.used[ju] {
            self.used[ju] = true;
            self.touched.push(j);
        }
        self.vals[ju] += v;
    }

    /// Append the accumulated row (sorted, pruned) and reset.
    fn drain_into(&mut self, indices: &mut Vec<u32>, values: &mut Vec<f64>, tol: f64) {
        self.touched.sort_unstable();
        for &j in &self.touched {
            let ju = j as usize;
            let v = self.vals[ju];
            if v.abs() >= tol {
                indices.push(j);
                values.push(v);
            }
            self.vals[ju] = 0.0;
            self.used[ju] = false;
        }
        self.touched.clear();
    }
}

impl CsrMatrix {
    pub fn from_parts(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_dim(rows + 1, indptr.len(), "row pointer length")?;
        check_dim(indices.len(), values.len(), "values length")?;
        check_dim(indices.len(), *indptr.last().unwrap_or(&0), "nonzero count")?;
        for i in 0..rows {
            if indptr[i] > indptr[i + 1] {
                return Err(Error::Parse(format!("row pointer decreases at row {i}")));
            }
            let row = &indices[indptr[i]..indptr[i + 1]];
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::Parse(format!("unsorted columns in row {i}")));
                }
            }
            if let Some(&last) = row.last() {
                if last as usize >= cols {
                    return Err(Error::Parse(format!("column {last} out of range in row {i}")));
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Build from (row, col, value) triplets; duplicates are summed and
    /// tiny results pruned.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(i, j, _) in &t {
            if i >= rows || j >= cols {
                return Err(Error::Domain(format!(
                    "triplet ({i},{j}) outside {rows}x{cols}"
                )));
            }
        }
        t.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values = Vec::with_capacity(t.len());
        let mut k = 0;
        for i in 0..rows {
            while k < t.len() && t[k].0 == i {
                let j = t[k].1;
                let mut v = 0.0;
                while k < t.len() && t[k].0 == i && t[k].1 == j {
                    v += t[k].2;
                    k += 1;
                }
                if v.abs() >= PRUNE_TOL {
                    indices.push(j as u32);
                    values.push(v);
                }
            }
            indptr[i + 1] = indices.len();
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, |r| r.len());
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, r) in dense.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    indices.push(j as u32);
                    values.push(v);
                }
            }
            indptr[i + 1] = indices.len();
        }
        Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n as u32).collect(),
            values: d.to_vec(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn nnz(&self) -> usize {
        self.values.len()
    }
    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    /// Pattern and mutable values at once.
    pub fn parts_mut(&mut self) -> (&[usize], &[u32], &mut [f64]) {
        (&self.indptr, &self.indices, &mut self.values)
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        match idx.binary_search(&(j as u32)) {
            Ok(k) => val[k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (i, row) in d.iter_mut().enumerate() {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                row[j as usize] = v;
            }
        }
        d
    }

    /// `y = A x`
    pub fn spmv(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.indptr[i], self.indptr[i + 1]);
            let mut s = 0.0;
            for k in a..b {
                s += self.values[k] * x[self.indices[k] as usize];
            }
            *yi = s;
        }
    }

    /// `y += alpha A x`
    pub fn spmv_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.indptr[i], self.indptr[i + 1]);
            let mut s = 0.0;
            for k in a..b {
                s += self.values[k] * x[self.indices[k] as usize];
            }
            *yi += alpha * s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.spmv(x, &mut y);
        y
    }

    /// `y = Aᵀ x` without forming the transpose.
    pub fn mul_vec_transpose(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                y[j as usize] += v * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.indices {
            counts[j as usize + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0u32; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                let p = next[j as usize];
                indices[p] = i as u32;
                values[p] = v;
                next[j as usize] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            indptr,
            indices,
            values,
        }
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dim(self.cols, other.rows, "matmul inner dimension")?;
        let mut acc = Accumulator::new(other.cols);
        let mut indptr = vec![0usize; self.rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.rows {
            let (ia, va) = self.row(i);
            for (&k, &a) in ia.iter().zip(va) {
                let (ib, vb) = other.row(k as usize);
                for (&j, &b) in ib.iter().zip(vb) {
                    acc.add(j, a * b);
                }
            }
            acc.drain_into(&mut indices, &mut values, PRUNE_TOL);
            indptr[i + 1] = indices.len();
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            indptr,
            indices,
            values,
        })
    }

    /// `P A Qᵀ`, computed one output row at a time so that the intermediate
    /// `P A` is never stored.
    pub fn triple_product(p: &Self, a: &Self, q: &Self) -> Result<Self> {
        check_dim(p.cols, a.rows, "triple product P·A")?;
        check_dim(a.cols, q.cols, "triple product A·Qᵀ")?;
        let qt = q.transpose();
        let mut acc1 = Accumulator::new(a.cols);
        let mut acc2 = Accumulator::new(q.rows);
        let mut row_idx = Vec::new();
        let mut row_val = Vec::new();
        let mut indptr = vec![0usize; p.rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..p.rows {
            let (ip, vp) = p.row(i);
            for (&k, &pv) in ip.iter().zip(vp) {
                let (ia, va) = a.row(k as usize);
                for (&j, &av) in ia.iter().zip(va) {
                    acc1.add(j, pv * av);
                }
            }
            row_idx.clear();
            row_val.clear();
            acc1.drain_into(&mut row_idx, &mut row_val, 0.0);
            for (&j, &v) in row_idx.iter().zip(&row_val) {
                let (iq, vq) = qt.row(j as usize);
                for (&l, &qv) in iq.iter().zip(vq) {
                    acc2.add(l, v * qv);
                }
            }
            acc2.drain_into(&mut indices, &mut values, PRUNE_TOL);
            indptr[i + 1] = indices.len();
        }
        indices.shrink_to_fit();
        values.shrink_to_fit();
        Ok(Self {
            rows: p.rows,
            cols: q.rows,
            indptr,
            indices,
            values,
        })
    }

    /// Kronecker product; the first factor's index varies slowest.
    pub fn kron(a: &Self, b: &Self) -> Self {
        let rows = a.rows * b.rows;
        let cols = a.cols * b.cols;
        let mut indptr = Vec::with_capacity(rows + 1);
        indptr.push(0);
        let mut indices = Vec::with_capacity(a.nnz() * b.nnz());
        let mut values = Vec::with_capacity(a.nnz() * b.nnz());
        for ia in 0..a.rows {
            let (ja, va) = a.row(ia);
            for ib in 0..b.rows {
                let (jb, vb) = b.row(ib);
                for (&ca, &x) in ja.iter().zip(va) {
                    for (&cb, &y) in jb.iter().zip(vb) {
                        indices.push((ca as usize * b.cols + cb as usize) as u32);
                        values.push(x * y);
                    }
                }
                indptr.push(indices.len());
            }
        }
        Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    /// Kronecker product of a list of factors.
    pub fn kron_all(factors: &[&Self]) -> Result<Self> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::Domain("empty Kronecker product".into()))?;
        let mut out = (*first).clone();
        for f in rest {
            out = Self::kron(&out, f);
        }
        Ok(out)
    }

    /// Submatrix with the given (increasing) row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut map = vec![u32::MAX; self.cols];
        for (new, &old) in cols.iter().enumerate() {
            map[old] = new as u32;
        }
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for &i in rows {
            let (idx, val) = self.row(i);
            let start = indices.len();
            for (&j, &v) in idx.iter().zip(val) {
                let m = map[j as usize];
                if m != u32::MAX {
                    indices.push(m);
                    values.push(v);
                }
            }
            // column lists may be permuted, so restore the sort order
            if !indices[start..].windows(2).all(|w| w[0] < w[1]) {
                let mut pairs: Vec<(u32, f64)> = indices[start..]
                    .iter()
                    .copied()
                    .zip(values[start..].iter().copied())
                    .collect();
                pairs.sort_unstable_by_key(|p| p.0);
                for (k, (j, v)) in pairs.into_iter().enumerate() {
                    indices[start + k] = j;
                    values[start + k] = v;
                }
            }
            indptr.push(indices.len());
        }
        Self {
            rows: rows.len(),
            cols: cols.len(),
            indptr,
            indices,
            values,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    /// Stack matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[&Self]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut indptr = vec![0usize];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for b in blocks {
            check_dim(cols, b.cols, "vstack column count")?;
            for i in 0..b.rows {
                let (idx, val) = b.row(i);
                indices.extend_from_slice(idx);
                values.extend_from_slice(val);
                indptr.push(indices.len());
            }
        }
        Ok(Self {
            rows: indptr.len() - 1,
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    /// `D₁ A D₂` for diagonal scalings given as vectors.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for k in out.indptr[i]..out.indptr[i + 1] {
                out.values[k] *= left[i] * right[out.indices[k] as usize];
            }
        }
        out
    }

    /// `self + alpha * other`
    pub fn add(&self, alpha: f64, other: &Self) -> Result<Self> {
        check_dim(self.rows, other.rows, "add rows")?;
        check_dim(self.cols, other.cols, "add cols")?;
        let mut indptr = vec![0usize; self.rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.rows {
            let (ia, va) = self.row(i);
            let (ib, vb) = other.row(i);
            let (mut x, mut y) = (0, 0);
            while x < ia.len() || y < ib.len() {
                let (j, v) = if y >= ib.len() || (x < ia.len() && ia[x] < ib[y]) {
                    x += 1;
                    (ia[x - 1], va[x - 1])
                } else if x >= ia.len() || ib[y] < ia[x] {
                    y += 1;
                    (ib[y - 1], alpha * vb[y - 1])
                } else {
                    x += 1;
                    y += 1;
                    (ia[x - 1], va[x - 1] + alpha * vb[y - 1])
                };
                if v.abs() >= PRUNE_TOL {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr[i + 1] = indices.len();
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A - Aᵀ|` over all entries.
    pub fn symmetry_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        match self.add(-1.0, &self.transpose()) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for (&j, &v) in self.indices.iter().zip(&self.values) {
            s[j as usize] += v;
        }
        s
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.rows)
            .map(|i| self.indptr[i + 1] - self.indptr[i])
            .max()
            .unwrap_or(0)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_dense(&[
            vec![4.0, -1.0, 0.0],
            vec![-1.0, 4.0, -1.0],
            vec![0.0, -1.0, 4.0],
            vec![1.0, 0.0, 2.0],
        ])
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (0, 1, 2.0), (1, 0, 5.0)])
            .unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 5.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn transpose_roundtrip() {
        let m = sample();
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.transpose().get(2, 3), 2.0);
    }

    #[test]
    fn kron_identities() {
        let k = CsrMatrix::kron(&CsrMatrix::identity(2), &CsrMatrix::identity(3));
        assert_eq!(k, CsrMatrix::identity(6));
    }

    #[test]
    fn triple_product_with_identity() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let i = CsrMatrix::identity(2);
        assert_eq!(CsrMatrix::triple_product(&i, &a, &i).unwrap(), a);
    }

    #[test]
    fn select_permuted_columns() {
        let m = sample();
        let s = m.select(&[1, 3], &[2, 0]);
        assert_eq!(s.to_dense(), vec![vec![-1.0, -1.0], vec![2.0, 1.0]]);
    }

    #[test]
    fn add_and_symmetry() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![0.5, 3.0]]);
        assert!((a.symmetry_defect() - 0.5).abs() < 1e-15);
        let z = a.add(-1.0, &a).unwrap();
        assert_eq!(z.nnz(), 0);
    }
}
