use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inter-element smoothness of a uniform spline space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Continuity {
    /// Interior knots repeated `p` times.
    C0,
    /// Simple interior knots, maximal smoothness `C^{p-1}`.
    Cpm1,
}

impl fmt::Display for Continuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Continuity::C0 => "c0",
            Continuity::Cpm1 => "cpm1",
        })
    }
}

impl FromStr for Continuity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c0" => Ok(Continuity::C0),
            "cpm1" | "cp-1" | "c^{p-1}" => Ok(Continuity::Cpm1),
            other => Err(Error::Config(format!("unknown continuity '{other}'"))),
        }
    }
}

/// Open uniform knot vector on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotVector {
    values: Vec<f64>,
    degree: usize,
    continuity: Continuity,
    n_spans: usize,
}

impl KnotVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn continuity(&self) -> Continuity {
        self.continuity
    }
    pub fn n_spans(&self) -> usize {
        self.n_spans
    }
    /// Multiplicity of each interior breakpoint.
    pub fn interior_multiplicity(&self) -> usize {
        match self.continuity {
            Continuity::C0 => self.degree,
            Continuity::Cpm1 => 1,
        }
    }
}

/// Open knot vector of degree `p` with `n_spans` equal spans.
pub fn open_uniform_knots(p: usize, n_spans: usize, r: Continuity) -> Result<KnotVector> {
    if !(1..=4).contains(&p) {
        return Err(Error::Domain(format!("degree {p} outside 1..=4")));
    }
    if n_spans == 0 || !n_spans.is_power_of_two() {
        return Err(Error::Domain(format!(
            "{n_spans} spans is not a power of two"
        )));
    }
    let mult = match r {
        Continuity::C0 => p,
        Continuity::Cpm1 => 1,
    };
    let mut values = vec![0.0; p + 1];
    for i in 1..n_spans {
        let x = i as f64 / n_spans as f64;
        values.extend(std::iter::repeat(x).take(mult));
    }
    values.extend(std::iter::repeat(1.0).take(p + 1));
    Ok(KnotVector {
        values,
        degree: p,
        continuity: r,
        n_spans,
    })
}

/// Univariate spline space induced by a knot vector at a dyadic level.
#[derive(Clone, Debug, PartialEq)]
pub struct SplineSpace {
    knots: KnotVector,
    level: usize,
    dim: usize,
}

impl SplineSpace {
    /// Space at `level` (1-based), i.e. with `2^(level-1)` spans.
    pub fn new(p: usize, r: Continuity, level: usize) -> Result<Self> {
        if level == 0 || level > 30 {
            return Err(Error::Domain(format!("level {level} outside 1..=30")));
        }
        Self::from_knots(open_uniform_knots(p, 1 << (level - 1), r)?)
    }

    /// Space with `n_spans` spans.
    pub fn with_spans(p: usize, r: Continuity, n_spans: usize) -> Result<Self> {
        Self::from_knots(open_uniform_knots(p, n_spans, r)?)
    }

    pub fn from_knots(knots: KnotVector) -> Result<Self> {
        let level = knots.n_spans.trailing_zeros() as usize + 1;
        let dim = knots.values.len() - knots.degree - 1;
        Ok(Self { knots, level, dim })
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }
    pub fn degree(&self) -> usize {
        self.knots.degree
    }
    pub fn continuity(&self) -> Continuity {
        self.knots.continuity
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n_spans(&self) -> usize {
        self.knots.n_spans
    }
    pub fn h(&self) -> f64 {
        1.0 / self.knots.n_spans as f64
    }

    /// The space one dyadic level coarser, if any.
    pub fn coarsen(&self) -> Option<Self> {
        if self.n_spans() < 2 {
            return None;
        }
        Self::with_spans(self.degree(), self.continuity(), self.n_spans() / 2).ok()
    }

    /// Support `[ξ_i, ξ_{i+p+1}]` of basis function `i`.
    pub fn support(&self, i: usize) -> (f64, f64) {
        let t = &self.knots.values;
        (t[i], t[i + self.degree() + 1])
    }

    /// Greville abscissae (knot averages), one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree();
        let t = &self.knots.values;
        (0..self.dim)
            .map(|i| t[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Index of the first basis function active on element `e`.
    pub fn element_first_function(&self, e: usize) -> usize {
        match self.continuity() {
            Continuity::C0 => e * self.degree(),
            Continuity::Cpm1 => e,
        }
    }

    /// Span index `s` with `ξ_s ≤ x < ξ_{s+1}`, the last span closed.
    fn find_span(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
        }
        let p = self.degree();
        let t = &self.knots.values;
        let last = self.dim - 1;
        if x >= t[last + 1] {
            return Ok(last);
        }
        // largest s with t[s] <= x
        let s = t.partition_point(|&k| k <= x) - 1;
        Ok(s.clamp(p, last))
    }

    /// Cox-de Boor triangle for degree `q ≤ p` on span `s`.
    fn basis_on_span(&self, s: usize, x: f64, q: usize) -> Vec<f64> {
        let t = &self.knots.values;
        let mut n = vec![0.0; q + 1];
        let mut left = vec![0.0; q + 1];
        let mut right = vec![0.0; q + 1];
        n[0] = 1.0;
        for j in 1..=q {
            left[j] = x - t[s + 1 - j];
            right[j] = t[s + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let denom = right[r + 1] + left[j - r];
                let tmp = if denom != 0.0 { n[r] / denom } else { 0.0 };
                n[r] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            n[j] = saved;
        }
        n
    }

    /// Values of the `p + 1` functions active at `x`, starting at the
    /// returned index.
    pub fn eval_basis(&self, x: f64) -> Result<(usize, Vec<f64>)> {
        let s = self.find_span(x)?;
        let p = self.degree();
        Ok((s - p, self.basis_on_span(s, x, p)))
    }

    /// Derivatives of the active functions at `x`.
    pub fn eval_basis_deriv(&self, x: f64) -> Result<(usize, Vec<f64>)> {
        let (first, _, d) = self.eval_with_deriv(x)?;
        Ok((first, d))
    }

    /// Values and first derivatives of the active functions at `x`.
    pub fn eval_with_deriv(&self, x: f64) -> Result<(usize, Vec<f64>, Vec<f64>)> {
        let s = self.find_span(x)?;
        let p = self.degree();
        let t = &self.knots.values;
        let vals = self.basis_on_span(s, x, p);
        let low = self.basis_on_span(s, x, p - 1);
        // low[r] is N_{s-p+1+r, p-1}
        let mut d = vec![0.0; p + 1];
        let pf = p as f64;
        for (k, dk) in d.iter_mut().enumerate() {
            let i = s - p + k;
            let mut v = 0.0;
            if k >= 1 {
                let den = t[i + p] - t[i];
                if den > 0.0 {
                    v += pf / den * low[k - 1];
                }
            }
            if k < p {
                let den = t[i + p + 1] - t[i + 1];
                if den > 0.0 {
                    v -= pf / den * low[k];
                }
            }
            *dk = v;
        }
        Ok((s - p, vals, d))
    }

    /// Value of the single basis function `i` at `x`.
    pub fn eval_function(&self, i: usize, x: f64) -> Result<f64> {
        if i >= self.dim {
            return Err(Error::Domain(format!("basis index {i} >= dim {}", self.dim)));
        }
        let (first, vals) = self.eval_basis(x)?;
        Ok(if i >= first && i <= first + self.degree() {
            vals[i - first]
        } else {
            0.0
        })
    }

    /// All `dim` basis values at `x` (dense; for tests and small oracles).
    pub fn eval_dense(&self, x: f64) -> Result<Vec<f64>> {
        let (first, vals) = self.eval_basis(x)?;
        let mut out = vec![0.0; self.dim];
        out[first..first + vals.len()].copy_from_slice(&vals);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knot_vectors() {
        let k = open_uniform_knots(2, 1, Continuity::Cpm1).unwrap();
        assert_eq!(k.values(), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let k = open_uniform_knots(2, 2, Continuity::Cpm1).unwrap();
        assert_eq!(k.values(), &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]);
        let s = SplineSpace::with_spans(3, Continuity::C0, 2).unwrap();
        assert_eq!(
            s.knots().values(),
            &[0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0]
        );
        assert_eq!(s.dim(), 7);
        assert!(open_uniform_knots(2, 3, Continuity::Cpm1).is_err());
    }

    #[test]
    fn dims_follow_continuity() {
        for p in 1..=4 {
            for n in [1, 2, 4, 8] {
                let a = SplineSpace::with_spans(p, Continuity::Cpm1, n).unwrap();
                let b = SplineSpace::with_spans(p, Continuity::C0, n).unwrap();
                assert_eq!(a.dim(), n + p);
                assert_eq!(b.dim(), p * n + 1);
            }
        }
    }

    #[test]
    fn quadratic_examples() {
        let s = SplineSpace::with_spans(2, Continuity::Cpm1, 1).unwrap();
        let (f, v) = s.eval_basis(0.5).unwrap();
        assert_eq!(f, 0);
        assert_eq!(v, vec![0.25, 0.5, 0.25]);
        let (_, d) = s.eval_basis_deriv(0.5).unwrap();
        for (a, b) in d.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let s = SplineSpace::with_spans(2, Continuity::Cpm1, 2).unwrap();
        let all = s.eval_dense(0.25).unwrap();
        for (a, b) in all.iter().zip([0.25, 0.625, 0.125, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_hat_slopes() {
        let s = SplineSpace::with_spans(1, Continuity::Cpm1, 2).unwrap();
        let (f, d) = s.eval_basis_deriv(0.25).unwrap();
        assert_eq!(f, 0);
        assert_eq!(d, vec![-2.0, 2.0]);
    }

    #[test]
    fn endpoints_interpolate() {
        for r in [Continuity::C0, Continuity::Cpm1] {
            let s = SplineSpace::with_spans(3, r, 4).unwrap();
            assert_eq!(s.eval_dense(0.0).unwrap()[0], 1.0);
            assert_eq!(s.eval_dense(1.0).unwrap()[s.dim() - 1], 1.0);
        }
        let s = SplineSpace::with_spans(2, Continuity::Cpm1, 4).unwrap();
        assert!(s.eval_basis(1.0 + 1e-9).is_err());
    }
}
