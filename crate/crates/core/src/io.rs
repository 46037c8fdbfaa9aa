//! Plain-text matrix format: the order `n` on the first line, then `n` rows
//! of `n` whitespace-separated numbers.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let n: usize =
        header.parse().map_err(|_| Error::Parse(format!("expected the matrix order on line 1, found '{header}'")))?;
    if n == 0 {
        return Err(Error::Parse("matrix order must be positive".into()));
    }
    let mut data = Vec::with_capacity(n * n);
    for r in 0..n {
        let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", r + 1)))?;
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse(format!("row {}: '{tok}' is not a number", r + 1)))?;
            data.push(v);
        }
        if data.len() - before != n {
            return Err(Error::Parse(format!("row {} has {} entries, expected {n}", r + 1, data.len() - before)));
        }
    }
    if lines.next().is_some() {
        return Err(Error::Parse(format!("trailing data after {n} rows")));
    }
    DenseMatrix::from_vec(n, n, data)
}

/// Square matrices only; entries are written with 17 significant digits.
pub fn format_matrix(m: &DenseMatrix) -> String {
    assert!(m.is_square(), "the text format holds square matrices");
    let mut out = String::with_capacity(m.rows() * m.cols() * 25);
    writeln!(out, "{}", m.rows()).unwrap();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> std::io::Result<()> {
    std::fs::write(path, format_matrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = DenseMatrix::from_rows(&[vec![1.0 / 3.0, -2.5e-300], vec![6.02e23, -0.0]]).unwrap();
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn accepts_scientific_notation() {
        let m = parse_matrix("2\n1e0 2.5E-1\n -3 4\n").unwrap();
        assert_eq!(m.as_slice(), &[1.0, 0.25, -3.0, 4.0]);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2\n1 2\n3\n").is_err());
        assert!(parse_matrix("2\n1 2\n3 x\n").is_err());
        assert!(parse_matrix("1\n1\n2\n").is_err());
        assert!(parse_matrix("1\nNaN\n").is_err());
    }
}
