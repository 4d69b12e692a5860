//! Matrix Market text I/O (`coordinate real general` for matrices, `array
//! real general` for vectors). Indices are 1-based on disk.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

pub fn matrix_to_string(a: &CsrMatrix) -> String {
    let mut s = String::with_capacity(32 * a.nnz() + 64);
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", a.rows(), a.cols(), a.nnz());
    for i in 0..a.rows() {
        let (idx, val) = a.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            let _ = writeln!(s, "{} {} {:e}", i + 1, j + 1, v);
        }
    }
    s
}

pub fn vector_to_string(v: &[f64]) -> String {
    let mut s = String::with_capacity(24 * v.len() + 64);
    s.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} 1", v.len());
    for x in v {
        let _ = writeln!(s, "{x:e}");
    }
    s
}

pub fn write_matrix(path: impl AsRef<Path>, a: &CsrMatrix) -> Result<()> {
    fs::write(path, matrix_to_string(a))?;
    Ok(())
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    fs::write(path, vector_to_string(v))?;
    Ok(())
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'))
}

fn header(text: &str) -> Result<Vec<String>> {
    let first = text.lines().next().ok_or_else(|| parse_err("empty file"))?;
    let toks: Vec<String> = first.split_whitespace().map(|t| t.to_lowercase()).collect();
    if toks.len() < 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(format!("bad banner: {first}")));
    }
    if toks[3] != "real" && toks[3] != "integer" {
        return Err(parse_err(format!("unsupported field {}", toks[3])));
    }
    Ok(toks)
}

fn num<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(format!("invalid {what}")))
}

pub fn matrix_from_str(text: &str) -> Result<CsrMatrix> {
    let toks = header(text)?;
    if toks[2] != "coordinate" {
        return Err(parse_err("expected coordinate format"));
    }
    let symmetric = match toks[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(format!("unsupported symmetry {other}"))),
    };
    let mut lines = data_lines(text);
    let size = lines.next().ok_or_else(|| parse_err("missing size line"))?;
    let mut it = size.split_whitespace();
    let rows: usize = num(it.next(), "row count")?;
    let cols: usize = num(it.next(), "column count")?;
    let nnz: usize = num(it.next(), "entry count")?;
    let mut trips = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
    for _ in 0..nnz {
        let l = lines.next().ok_or_else(|| parse_err("truncated entries"))?;
        let mut it = l.split_whitespace();
        let i: usize = num(it.next(), "row index")?;
        let j: usize = num(it.next(), "column index")?;
        let v: f64 = num(it.next(), "value")?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(parse_err(format!("index ({i},{j}) out of range")));
        }
        trips.push((i - 1, j - 1, v));
        if symmetric && i != j {
            trips.push((j - 1, i - 1, v));
        }
    }
    // keep explicit entries exactly as written, including tiny ones
    trips.sort_unstable_by_key(|&(i, j, _)| (i, j));
    let mut indptr = vec![0usize; rows + 1];
    let mut indices = Vec::with_capacity(trips.len());
    let mut values: Vec<f64> = Vec::with_capacity(trips.len());
    let mut last: Option<(usize, usize)> = None;
    for (i, j, v) in trips {
        if last == Some((i, j)) {
            *values.last_mut().unwrap() += v;
            continue;
        }
        indices.push(j as u32);
        values.push(v);
        indptr[i + 1] += 1;
        last = Some((i, j));
    }
    for i in 0..rows {
        indptr[i + 1] += indptr[i];
    }
    CsrMatrix::from_parts(rows, cols, indptr, indices, values)
}

pub fn vector_from_str(text: &str) -> Result<Vec<f64>> {
    let toks = header(text)?;
    if toks[2] != "array" {
        return Err(parse_err("expected array format"));
    }
    let mut lines = data_lines(text);
    let size = lines.next().ok_or_else(|| parse_err("missing size line"))?;
    let mut it = size.split_whitespace();
    let rows: usize = num(it.next(), "row count")?;
    let cols: usize = num(it.next(), "column count")?;
    if cols != 1 {
        return Err(parse_err("expected a single column"));
    }
    let mut v = Vec::with_capacity(rows);
    for _ in 0..rows {
        let l = lines.next().ok_or_else(|| parse_err("truncated vector"))?;
        v.push(num(l.split_whitespace().next(), "value")?);
    }
    Ok(v)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    matrix_from_str(&fs::read_to_string(path)?)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    vector_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let a = CsrMatrix::from_dense(&[
            vec![0.1, 0.0, 1.0 / 3.0],
            vec![0.0, -2.5e-300, 0.0],
        ]);
        let b = matrix_from_str(&matrix_to_string(&a)).unwrap();
        assert_eq!(a, b);
        let v = vec![std::f64::consts::PI, -1e-17, 0.0];
        assert_eq!(vector_from_str(&vector_to_string(&v)).unwrap(), v);
    }

    #[test]
    fn symmetric_files_are_expanded() {
        let s = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2.0\n2 1 -1.0\n";
        let a = matrix_from_str(s).unwrap();
        assert_eq!(a.to_dense(), vec![vec![2.0, -1.0], vec![-1.0, 0.0]]);
    }
}
