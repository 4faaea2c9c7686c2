//! File formats.
//!
//! * CSV: comma-separated `0`/`1` tokens, one row per line, with an
//!   optional header line (detected by any token other than `0` or `1`).
//! * BMI container: `b"BMI1"`, `n_rows: u64 LE`, `n_cols: u64 LE`, then
//!   `n_cols` blocks of `ceil(n_rows / 64)` little-endian `u64` words, the
//!   in-memory column layout verbatim. Padding bits must be zero.
//! * Triplets: `n_rows n_cols nnz` on the first line, then `nnz` lines of
//!   0-based `row col` coordinates of the ones, in any order.
//! * MI output: `m` lines of `m` comma-separated fixed-point values.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::binmat::{words_for, BinaryMatrix, SparseBinaryMatrix};
use crate::error::{Error, Result};
use crate::mi::{FloatMatrix, MIMatrix};

pub const BMI_MAGIC: &[u8; 4] = b"BMI1";
const BMI_HEADER_LEN: usize = 20;

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

/// Parses CSV text; `path` is only used in error messages.
pub fn parse_csv(text: &str, path: &Path) -> Result<BinaryMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    if let Some((_, first)) = lines.peek() {
        if first.split(',').any(|t| !matches!(t.trim(), "0" | "1")) {
            lines.next();
        }
    }

    let mut n_cols = None;
    let mut cells = Vec::new();
    let mut n_rows = 0usize;
    for (line_no, line) in lines {
        let start = cells.len();
        for (k, tok) in line.split(',').enumerate() {
            match tok.trim() {
                "0" => cells.push(false),
                "1" => cells.push(true),
                other => {
                    return Err(parse_err(
                        path,
                        line_no,
                        k + 1,
                        format!("expected 0 or 1, found {other:?}"),
                    ))
                }
            }
        }
        let width = cells.len() - start;
        match n_cols {
            None => n_cols = Some(width),
            Some(w) if w != width => {
                return Err(Error::Dimension(format!(
                    "{}:{line_no}: row has {width} values, expected {w}",
                    path.display()
                )))
            }
            _ => {}
        }
        n_rows += 1;
    }
    let n_cols =
        n_cols.ok_or_else(|| Error::Dimension(format!("{}: no data rows", path.display())))?;
    BinaryMatrix::from_fn(n_rows, n_cols, |r, c| cells[r * n_cols + c])
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<BinaryMatrix> {
    let path = path.as_ref();
    parse_csv(&read_to_string(path)?, path)
}

pub fn write_csv(m: &BinaryMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let mut line = String::with_capacity(2 * m.n_cols());
    for r in 0..m.n_rows() {
        line.clear();
        for c in 0..m.n_cols() {
            if c > 0 {
                line.push(',');
            }
            line.push(if m.get(r, c) { '1' } else { '0' });
        }
        line.push('\n');
        out.write_all(line.as_bytes())
            .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Serializes to the BMI container layout.
pub fn encode_bmi(m: &BinaryMatrix) -> Vec<u8> {
    let mut buf = Vec::with_capacity(BMI_HEADER_LEN + m.words().len() * 8);
    buf.extend_from_slice(BMI_MAGIC);
    buf.extend_from_slice(&(m.n_rows() as u64).to_le_bytes());
    buf.extend_from_slice(&(m.n_cols() as u64).to_le_bytes());
    for w in m.words() {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    buf
}

/// Parses a BMI container; `path` is only used in error messages.
pub fn decode_bmi(bytes: &[u8], path: &Path) -> Result<BinaryMatrix> {
    let format = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < 4 || &bytes[..4] != BMI_MAGIC {
        return Err(format("bad magic, expected \"BMI1\"".into()));
    }
    if bytes.len() < BMI_HEADER_LEN {
        return Err(format(format!(
            "header truncated: {} of {BMI_HEADER_LEN} bytes",
            bytes.len()
        )));
    }
    let u64_at = |off: usize| u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    let (n_rows, n_cols) = (u64_at(4), u64_at(12));
    if n_rows == 0 || n_cols == 0 {
        return Err(format(format!("empty shape {n_rows}x{n_cols}")));
    }
    let expected = usize::try_from(n_rows)
        .ok()
        .zip(usize::try_from(n_cols).ok())
        .and_then(|(r, c)| words_for(r).checked_mul(c)?.checked_mul(8))
        .ok_or_else(|| format(format!("shape {n_rows}x{n_cols} too large")))?;
    let payload = &bytes[BMI_HEADER_LEN..];
    if payload.len() != expected {
        return Err(Error::Length {
            path: path.to_path_buf(),
            expected: expected as u64,
            found: payload.len() as u64,
        });
    }
    let words = payload
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    BinaryMatrix::from_column_words(n_rows as usize, n_cols as usize, words).map_err(|e| {
        Error::Validation {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    })
}

pub fn read_bmi(path: impl AsRef<Path>) -> Result<BinaryMatrix> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_bmi(&bytes, path)
}

pub fn write_bmi(m: &BinaryMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_bmi(m)).map_err(|e| Error::io(path, e))
}

/// Parses triplet text; `path` is only used in error messages.
pub fn parse_triplets(text: &str, path: &Path) -> Result<SparseBinaryMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let fields = |line_no: usize, line: &str, want: usize| -> Result<Vec<usize>> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != want {
            return Err(parse_err(
                path,
                line_no,
                1,
                format!("expected {want} fields, found {}", toks.len()),
            ));
        }
        toks.iter()
            .enumerate()
            .map(|(k, t)| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(path, line_no, k + 1, format!("invalid integer {t:?}")))
            })
            .collect()
    };

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, 1, "missing header line \"n_rows n_cols nnz\""))?;
    let h = fields(header_no, header, 3)?;
    let (n_rows, n_cols, nnz) = (h[0], h[1], h[2]);

    let mut entries = Vec::with_capacity(nnz);
    let mut last_line = header_no;
    for (line_no, line) in lines {
        let e = fields(line_no, line, 2)?;
        if e[0] >= n_rows || e[1] >= n_cols {
            return Err(Error::Dimension(format!(
                "{}:{line_no}: entry ({}, {}) out of range for {n_rows}x{n_cols}",
                path.display(),
                e[0],
                e[1]
            )));
        }
        entries.push((e[0], e[1]));
        last_line = line_no;
    }
    if entries.len() != nnz {
        return Err(parse_err(
            path,
            last_line,
            1,
            format!("header declares {nnz} entries, found {}", entries.len()),
        ));
    }
    SparseBinaryMatrix::from_entries(n_rows, n_cols, entries).map_err(|e| match e {
        Error::Domain(message) => Error::Format {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn read_triplets(path: impl AsRef<Path>) -> Result<SparseBinaryMatrix> {
    let path = path.as_ref();
    parse_triplets(&read_to_string(path)?, path)
}

/// Writes in canonical (column-major, increasing row) order.
pub fn write_triplets(s: &SparseBinaryMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(out, "{} {} {}", s.n_rows(), s.n_cols(), s.nnz()).map_err(io)?;
    for (r, c) in s.entries() {
        writeln!(out, "{r} {c}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Formats each value with `precision` digits after the decimal point.
pub fn format_mi_matrix(mi: &MIMatrix, precision: usize) -> String {
    let mut s = String::new();
    for i in 0..mi.dim() {
        for (j, v) in mi.row(i).iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&format!("{v:.precision$}"));
        }
        s.push('\n');
    }
    s
}

pub fn write_mi_matrix(mi: &MIMatrix, path: impl AsRef<Path>, precision: usize) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_mi_matrix(mi, precision)).map_err(|e| Error::io(path, e))
}

/// Reads a square matrix of decimal values written by [`write_mi_matrix`].
pub fn read_mi_matrix(path: impl AsRef<Path>) -> Result<FloatMatrix> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut data = Vec::new();
    let mut rows = 0;
    for (i, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        for (k, tok) in line.split(',').enumerate() {
            let v = tok
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(path, i + 1, k + 1, format!("invalid number {tok:?}")))?;
            data.push(v);
        }
        rows += 1;
    }
    FloatMatrix::from_vec(rows, data)
}
