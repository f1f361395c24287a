//! Matrix Market coordinate format, `real general` only.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::SparseMatrix;
use crate::error::{Error, Result};

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text)
}

pub(crate) fn parse_matrix_market(text: &str) -> Result<SparseMatrix<f64>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::parse(ln, "missing %%MatrixMarket matrix header"));
    }
    if words[2] != "coordinate" || words[3] != "real" || words[4] != "general" {
        return Err(Error::parse(
            ln,
            format!("unsupported format '{} {} {}'", words[2], words[3], words[4]),
        ));
    }

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (ln, size) = body
        .next()
        .ok_or_else(|| Error::parse(ln + 1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|w| w.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(ln, format!("bad size line: {e}")))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(Error::parse(ln, "size line needs three integers"));
    };
    if rows != cols {
        return Err(Error::parse(ln, format!("matrix is {rows}x{cols}, not square")));
    }

    let mut trip = Vec::with_capacity(nnz);
    for (ln, line) in body {
        let mut it = line.split_whitespace();
        let (Some(r), Some(c), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(Error::parse(ln, "expected 'row col value'"));
        };
        let r: usize = r.parse().map_err(|_| Error::parse(ln, "bad row index"))?;
        let c: usize = c.parse().map_err(|_| Error::parse(ln, "bad column index"))?;
        let v: f64 = v.parse().map_err(|_| Error::parse(ln, "bad value"))?;
        if r == 0 || c == 0 || r > rows || c > cols {
            return Err(Error::parse(ln, format!("index ({r}, {c}) out of range")));
        }
        trip.push((r - 1, c - 1, v));
    }
    if trip.len() != nnz {
        return Err(Error::parse(
            text.lines().count(),
            format!("expected {nnz} entries, found {}", trip.len()),
        ));
    }
    SparseMatrix::from_triplets(&trip, rows)
}

pub fn write_matrix_market(a: &SparseMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    out.write_all(format_matrix_market(a).as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn format_matrix_market(a: &SparseMatrix<f64>) -> String {
    let mut s = format!("{HEADER}\n{} {} {}\n", a.order(), a.order(), a.nnz());
    for (r, c, v) in a.triplets() {
        s.push_str(&format!("{} {} {:.16e}\n", r + 1, c + 1, v));
    }
    s
}
