//! Plain-text matrix files.
//!
//! Two kinds share one reader. A symmetric tridiagonal matrix is stored as
//! its diagonals:
//!
//! ```text
//! symtridiag 3
//! 2.0000000000000000e0 2.0000000000000000e0 2.0000000000000000e0
//! -1.0000000000000000e0 -1.0000000000000000e0
//! ```
//!
//! and a dense symmetric matrix as its full rows:
//!
//! ```text
//! densesym 2
//! 4.0000000000000000e0 1.0000000000000000e0
//! 1.0000000000000000e0 3.0000000000000000e0
//! ```
//!
//! Values are written with 17 significant digits so a write/read round trip
//! reproduces every `f64` bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;
use trideig_core::tridiag::Mat;
use trideig_core::{DenseSym, SymTridiag};

/// What can go wrong reading or writing a matrix file.
#[derive(Debug, Error)]
pub enum FileError {
    /// Filesystem-level failure; carries the path involved.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Malformed content; `line` is 1-based.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

impl FileError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        FileError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// A parsed matrix file: either kind, ready for a solver.
#[derive(Debug, Clone)]
pub enum MatrixFile {
    Tridiag(SymTridiag),
    Dense(DenseSym),
}

impl MatrixFile {
    /// Matrix order.
    #[must_use]
    pub fn n(&self) -> usize {
        match self {
            MatrixFile::Tridiag(t) => t.n(),
            MatrixFile::Dense(a) => a.n(),
        }
    }
}

fn push_row(out: &mut String, row: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in row {
        if !first {
            out.push(' ');
        }
        let _ = write!(out, "{v:.16e}");
        first = false;
    }
    out.push('\n');
}

/// Render a matrix in the file format.
#[must_use]
pub fn render_matrix(m: &MatrixFile) -> String {
    let mut out = String::new();
    match m {
        MatrixFile::Tridiag(t) => {
            let _ = writeln!(out, "symtridiag {}", t.n());
            push_row(&mut out, t.diag().iter().copied());
            push_row(&mut out, t.offdiag().iter().copied());
        }
        MatrixFile::Dense(a) => {
            let _ = writeln!(out, "densesym {}", a.n());
            for i in 0..a.n() {
                push_row(&mut out, a.as_mat().row(i).iter().copied());
            }
        }
    }
    out
}

/// Render a general matrix (eigenvector output) with a `mat rows cols`
/// header followed by its rows.
#[must_use]
pub fn render_mat(m: &Mat) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mat {} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        push_row(&mut out, m.row(i).iter().copied());
    }
    out
}

fn parse_row(text: &str, line: usize, want: usize, path: &str) -> Result<Vec<f64>, FileError> {
    let mut out = Vec::with_capacity(want);
    for tok in text.split_whitespace() {
        let v: f64 = tok.parse().map_err(|_| FileError::Parse {
            path: path.to_string(),
            line,
            msg: format!("not a number: {tok:?}"),
        })?;
        if !v.is_finite() {
            return Err(FileError::Parse {
                path: path.to_string(),
                line,
                msg: format!("non-finite entry {tok:?}"),
            });
        }
        out.push(v);
    }
    if out.len() != want {
        return Err(FileError::Parse {
            path: path.to_string(),
            line,
            msg: format!("expected {want} entries, found {}", out.len()),
        });
    }
    Ok(out)
}

/// Parse matrix-file text. `path` only labels error messages.
pub fn parse_matrix(text: &str, path: &str) -> Result<MatrixFile, FileError> {
    let perr = |line: usize, msg: String| FileError::Parse {
        path: path.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| perr(1, "empty file".to_string()))?;
    let mut parts = header.split_whitespace();
    let kind = parts
        .next()
        .ok_or_else(|| perr(1, "missing matrix kind".to_string()))?;
    let n: usize = parts
        .next()
        .ok_or_else(|| perr(1, "missing matrix order".to_string()))?
        .parse()
        .map_err(|_| perr(1, "matrix order is not a positive integer".to_string()))?;
    if parts.next().is_some() {
        return Err(perr(1, "trailing tokens after header".to_string()));
    }
    if n == 0 {
        return Err(perr(1, "matrix order must be at least 1".to_string()));
    }
    match kind {
        "symtridiag" => {
            let diag = parse_row(lines.next().unwrap_or(""), 2, n, path)?;
            let off = parse_row(lines.next().unwrap_or(""), 3, n - 1, path)?;
            let t = SymTridiag::new(diag, off).map_err(|e| perr(1, e.to_string()))?;
            Ok(MatrixFile::Tridiag(t))
        }
        "densesym" => {
            let mut m = Mat::zeros(n, n);
            for i in 0..n {
                let row = parse_row(lines.next().unwrap_or(""), 2 + i, n, path)?;
                for (j, &v) in row.iter().enumerate() {
                    m.set(i, j, v);
                }
            }
            let a = DenseSym::new(m).map_err(|e| perr(2, e.to_string()))?;
            Ok(MatrixFile::Dense(a))
        }
        other => Err(perr(1, format!("unknown matrix kind {other:?}"))),
    }
}

/// Read and parse a matrix file.
pub fn read_matrix(path: &Path) -> Result<MatrixFile, FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
    parse_matrix(&text, &path.display().to_string())
}

/// Write a matrix file.
pub fn write_matrix(path: &Path, m: &MatrixFile) -> Result<(), FileError> {
    fs::write(path, render_matrix(m)).map_err(|e| FileError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag_example() -> SymTridiag {
        SymTridiag::new(vec![2.0, -0.125, 1e-11], vec![0.5, -3.75]).unwrap()
    }

    #[test]
    fn tridiag_roundtrip_is_bit_exact() {
        let t = tridiag_example();
        let text = render_matrix(&MatrixFile::Tridiag(t.clone()));
        let back = parse_matrix(&text, "mem").unwrap();
        let MatrixFile::Tridiag(u) = back else {
            panic!("kind changed in roundtrip");
        };
        assert_eq!(
            t.diag().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            u.diag().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(
            t.offdiag().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            u.offdiag().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn dense_roundtrip_is_bit_exact() {
        let a = DenseSym::from_fn(3, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let text = render_matrix(&MatrixFile::Dense(a.clone()));
        let back = parse_matrix(&text, "mem").unwrap();
        let MatrixFile::Dense(b) = back else {
            panic!("kind changed in roundtrip");
        };
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.at(i, j).to_bits(), b.at(i, j).to_bits());
            }
        }
    }

    #[test]
    fn order_one_tridiag_has_empty_offdiagonal_line() {
        let t = SymTridiag::new(vec![7.0], vec![]).unwrap();
        let text = render_matrix(&MatrixFile::Tridiag(t));
        assert_eq!(text.lines().count(), 3);
        let back = parse_matrix(&text, "mem").unwrap();
        assert_eq!(back.n(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_entry = "symtridiag 2\n1.0 spam\n0.5\n";
        let err = parse_matrix(bad_entry, "f").unwrap_err();
        assert_eq!(err.to_string(), "f:2: not a number: \"spam\"");

        let short_row = "symtridiag 3\n1.0 2.0 3.0\n0.5\n";
        let err = parse_matrix(short_row, "f").unwrap_err();
        assert_eq!(err.to_string(), "f:3: expected 2 entries, found 1");

        let bad_kind = "banded 3\n";
        let err = parse_matrix(bad_kind, "f").unwrap_err();
        assert!(err.to_string().starts_with("f:1: unknown matrix kind"));

        let asym = "densesym 2\n1.0 2.0\n3.0 4.0\n";
        let err = parse_matrix(asym, "f").unwrap_err();
        assert!(err.to_string().contains("not symmetric"));
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        let nan = "symtridiag 2\n1.0 NaN\n0.5\n";
        let err = parse_matrix(nan, "f").unwrap_err();
        assert!(err.to_string().contains("non-finite"));
        let inf = "symtridiag 2\n1.0 inf\n0.5\n";
        assert!(parse_matrix(inf, "f").is_err());
    }
}
