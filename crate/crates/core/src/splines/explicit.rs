//! Closed-form piecewise polynomial expressions for uniform B-splines of
//! degree 2, 3 and 4.
//!
//! Indices are 0-based. Interior pieces are stored as ascending monomial
//! coefficients in `t = x/h - anchor`, where `anchor` is the left end of the
//! function's support in units of `h`; piece `m` covers `[m, m+1)` in `t`.

use super::knots::Continuity;
use crate::error::{Error, Result};

type Piece = &'static [f64];

// left boundary functions, `t = x/h`
const P2_LEFT: [&[Piece]; 2] = [
    &[&[1.0, -2.0, 1.0]],
    &[&[0.0, 2.0, -1.5], &[2.0, -2.0, 0.5]],
];
const P2_CARDINAL: [Piece; 3] = [&[0.0, 0.0, 0.5], &[-1.5, 3.0, -1.0], &[4.5, -3.0, 0.5]];

const P3_LEFT: [&[Piece]; 3] = [
    &[&[1.0, -3.0, 3.0, -1.0]],
    &[&[0.0, 3.0, -4.5, 1.75], &[2.0, -3.0, 1.5, -0.25]],
    &[
        &[0.0, 0.0, 1.5, -11.0 / 12.0],
        &[-1.5, 4.5, -3.0, 7.0 / 12.0],
        &[4.5, -4.5, 1.5, -1.0 / 6.0],
    ],
];
const P3_CARDINAL: [Piece; 4] = [
    &[0.0, 0.0, 0.0, 1.0 / 6.0],
    &[4.0 / 6.0, -2.0, 2.0, -0.5],
    &[-44.0 / 6.0, 10.0, -4.0, 0.5],
    &[64.0 / 6.0, -8.0, 2.0, -1.0 / 6.0],
];

const P4_LEFT: [&[Piece]; 4] = [
    &[&[1.0, -4.0, 6.0, -4.0, 1.0]],
    &[&[0.0, 4.0, -9.0, 7.0, -15.0 / 8.0], &[2.0, -4.0, 3.0, -1.0, 1.0 / 8.0]],
    &[
        &[0.0, 0.0, 3.0, -11.0 / 3.0, 85.0 / 72.0],
        &[-1.5, 6.0, -6.0, 7.0 / 3.0, -23.0 / 72.0],
        &[4.5, -6.0, 3.0, -2.0 / 3.0, 1.0 / 18.0],
    ],
    &[
        &[0.0, 0.0, 0.0, 2.0 / 3.0, -25.0 / 72.0],
        &[2.0 / 3.0, -8.0 / 3.0, 4.0, -2.0, 23.0 / 72.0],
        &[-22.0 / 3.0, 40.0 / 3.0, -8.0, 2.0, -13.0 / 72.0],
        &[32.0 / 3.0, -32.0 / 3.0, 4.0, -2.0 / 3.0, 1.0 / 24.0],
    ],
];
const P4_CARDINAL: [Piece; 5] = [
    &[0.0, 0.0, 0.0, 0.0, 1.0 / 24.0],
    &[-5.0 / 24.0, 20.0 / 24.0, -30.0 / 24.0, 20.0 / 24.0, -4.0 / 24.0],
    &[155.0 / 24.0, -300.0 / 24.0, 210.0 / 24.0, -60.0 / 24.0, 6.0 / 24.0],
    &[-655.0 / 24.0, 780.0 / 24.0, -330.0 / 24.0, 60.0 / 24.0, -4.0 / 24.0],
    &[625.0 / 24.0, -500.0 / 24.0, 150.0 / 24.0, -20.0 / 24.0, 1.0 / 24.0],
];

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn bernstein(p: usize, j: usize, t: f64) -> f64 {
    binomial(p, j) * t.powi(j as i32) * (1.0 - t).powi((p - j) as i32)
}

/// Piecewise evaluation: `pieces[m]` is valid for `t ∈ [m, m+1)`, the last
/// piece closed on the right.
fn eval_pieces(pieces: &[Piece], t: f64) -> f64 {
    if t < 0.0 || t > pieces.len() as f64 {
        return 0.0;
    }
    let m = (t.floor() as usize).min(pieces.len() - 1);
    horner(pieces[m], t)
}

/// Two-span formulas, written in `x` on `[0, 1/2)` and `[1/2, 1]`.
fn level2(p: usize, i: usize, x: f64) -> f64 {
    let left = x < 0.5;
    let y = 1.0 - x;
    match (p, i) {
        (2, 0) => if left { (1.0 - 2.0 * x).powi(2) } else { 0.0 },
        (2, 1) => if left { 2.0 * x * (2.0 - 3.0 * x) } else { 2.0 * y * y },
        (2, 2) => if left { 2.0 * x * x } else { -2.0 + 8.0 * x - 6.0 * x * x },
        (2, 3) => if left { 0.0 } else { (1.0 - 2.0 * x).powi(2) },
        (3, 0) => if left { (1.0 - 2.0 * x).powi(3) } else { 0.0 },
        (3, 1) => if left { 2.0 * x * (3.0 - 9.0 * x + 7.0 * x * x) } else { 2.0 * y.powi(3) },
        (3, 2) => if left {
            2.0 * x * x * (3.0 - 4.0 * x)
        } else {
            2.0 * (x - 1.0).powi(2) * (4.0 * x - 1.0)
        },
        (3, 3) => if left {
            2.0 * x.powi(3)
        } else {
            2.0 - 12.0 * x + 24.0 * x * x - 14.0 * x.powi(3)
        },
        (3, 4) => if left { 0.0 } else { (2.0 * x - 1.0).powi(3) },
        (4, 0) => if left { (1.0 - 2.0 * x).powi(4) } else { 0.0 },
        (4, 1) => if left {
            2.0 * x * (4.0 - 18.0 * x + 28.0 * x * x - 15.0 * x.powi(3))
        } else {
            2.0 * y.powi(4)
        },
        (4, 2) => if left {
            2.0 * x * x * (6.0 - 16.0 * x + 11.0 * x * x)
        } else {
            2.0 * y.powi(3) * (5.0 * x - 1.0)
        },
        (4, 3) => if left {
            2.0 * x.powi(3) * (4.0 - 5.0 * x)
        } else {
            2.0 * y * y * (1.0 - 6.0 * x + 11.0 * x * x)
        },
        (4, 4) => if left {
            2.0 * x.powi(4)
        } else {
            -2.0 + 16.0 * x - 48.0 * x * x + 64.0 * x.powi(3) - 30.0 * x.powi(4)
        },
        (4, 5) => if left { 0.0 } else { (1.0 - 2.0 * x).powi(4) },
        _ => unreachable!("checked by caller"),
    }
}

fn tables(p: usize) -> (&'static [&'static [Piece]], &'static [Piece]) {
    match p {
        2 => (&P2_LEFT, &P2_CARDINAL),
        3 => (&P3_LEFT, &P3_CARDINAL),
        _ => (&P4_LEFT, &P4_CARDINAL),
    }
}

/// Value of basis function `i` (0-based) of the degree-`p` space with
/// continuity `r` at level `k` (`2^(k-1)` spans), from closed-form
/// expressions rather than the recursion.
pub fn eval_explicit(p: usize, r: Continuity, k: usize, i: usize, x: f64) -> Result<f64> {
    if !(2..=4).contains(&p) {
        return Err(Error::Unsupported(format!("closed forms exist for p in 2..=4, got {p}")));
    }
    if k == 0 || k > 30 {
        return Err(Error::Unsupported(format!("level {k}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    let n = 1usize << (k - 1);
    let dim = match r {
        Continuity::C0 => p * n + 1,
        Continuity::Cpm1 => n + p,
    };
    if i >= dim {
        return Err(Error::Unsupported(format!(
            "index {i} outside the {dim} functions of level {k}"
        )));
    }
    if k == 1 {
        return Ok(bernstein(p, i, x));
    }
    let h = 1.0 / n as f64;
    match r {
        Continuity::C0 => {
            // element Bernstein polynomials glued at the vertices
            let s = x / h;
            let e = ((s.floor() as usize).min(n - 1)) as f64;
            let t = s - e;
            let e = e as usize;
            let (elem, j) = (i / p, i % p);
            if j == 0 {
                if elem == e {
                    Ok((1.0 - t).powi(p as i32))
                } else if elem == e + 1 {
                    Ok(t.powi(p as i32))
                } else {
                    Ok(0.0)
                }
            } else if elem == e {
                Ok(bernstein(p, j, t))
            } else {
                Ok(0.0)
            }
        }
        Continuity::Cpm1 => {
            if k == 2 {
                return Ok(level2(p, i, x));
            }
            // k >= 3 gives n >= 4 >= p: boundary families never meet
            let (left, cardinal) = tables(p);
            if i < p {
                Ok(eval_pieces(left[i], x / h))
            } else if i >= n {
                Ok(eval_pieces(left[n + p - 1 - i], (1.0 - x) / h))
            } else {
                let anchor = (i - p) as f64;
                Ok(eval_pieces(cardinal, x / h - anchor))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogued_values() {
        let h = 1.0 / 8.0;
        let v = eval_explicit(2, Continuity::Cpm1, 4, 0, h / 2.0).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let v = eval_explicit(3, Continuity::Cpm1, 1, 1, 0.5).unwrap();
        assert!((v - 0.375).abs() < 1e-15);
        assert_eq!(eval_explicit(4, Continuity::C0, 2, 0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn unsupported_cases() {
        assert!(eval_explicit(5, Continuity::C0, 2, 0, 0.0).is_err());
        assert!(eval_explicit(2, Continuity::Cpm1, 2, 4, 0.0).is_err());
    }
}
