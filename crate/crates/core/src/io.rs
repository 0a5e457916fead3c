//! Plain-text formats: matrix bundles, flat `key=value` config files and
//! run manifests.
//!
//! A matrix bundle is a list of `#key=value` header lines followed by one or
//! more named matrices:
//!
//! ```text
//! #generator=latent
//! #seed=7
//! [S]
//! 2 2
//! 1e0 -2.5e-1
//! -2.5e-1 1e0
//! ```
//!
//! Values are written with 17 significant digits, which parses back to the same
//! `f64`, so a write/read cycle is lossless.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Header entries plus named matrices, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bundle {
    pub header: Vec<(String, String)>,
    pub matrices: Vec<(String, DenseMatrix)>,
}

impl Bundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_header(mut self, key: &str, value: impl ToString) -> Self {
        self.header.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_matrix(mut self, name: &str, m: DenseMatrix) -> Self {
        self.matrices.push((name.to_string(), m));
        self
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&DenseMatrix> {
        self.matrices.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// Named matrix, or a parse error naming it.
    pub fn require(&self, name: &str) -> Result<&DenseMatrix> {
        self.get(name).ok_or_else(|| Error::Parse(format!("bundle has no matrix `{name}`")))
    }

    pub fn first(&self) -> Result<&DenseMatrix> {
        self.matrices.first().map(|(_, m)| m).ok_or_else(|| Error::Parse("bundle holds no matrix".into()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "#{k}={v}");
        }
        for (name, m) in &self.matrices {
            let _ = writeln!(out, "[{name}]");
            out.push_str(&matrix_to_text(m));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut bundle = Bundle::new();
        let mut lines = text.lines().enumerate().peekable();
        let mut pending: Option<String> = None;
        while let Some((no, raw)) = lines.next() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) =
                    rest.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: header without `=`", no + 1)))?;
                bundle.header.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                pending = Some(name.trim().to_string());
                continue;
            }
            let dims: Vec<&str> = line.split_whitespace().collect();
            let (rows, cols) = match dims.as_slice() {
                [r, c] => (parse_count(r, no)?, parse_count(c, no)?),
                _ => return Err(Error::Parse(format!("line {}: expected `rows cols`", no + 1))),
            };
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let (rno, row) = lines
                    .next()
                    .ok_or_else(|| Error::Parse(format!("matrix starting at line {} is truncated", no + 1)))?;
                let before = data.len();
                for tok in row.split_whitespace() {
                    data.push(parse_f64(tok, rno)?);
                }
                if data.len() - before != cols {
                    return Err(Error::Parse(format!("line {}: expected {cols} values", rno + 1)));
                }
            }
            let name = pending.take().unwrap_or_else(|| format!("m{}", bundle.matrices.len()));
            let m = DenseMatrix::new(rows, cols, data).map_err(|e| Error::Parse(format!("matrix `{name}`: {e}")))?;
            bundle.matrices.push((name, m));
        }
        Ok(bundle)
    }
}

fn parse_count(tok: &str, no: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse(format!("line {}: `{tok}` is not a count", no + 1)))
}

fn parse_f64(tok: &str, no: usize) -> Result<f64> {
    tok.parse().map_err(|_| Error::Parse(format!("line {}: `{tok}` is not a number", no + 1)))
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `rows cols` line followed by one line per row.
pub fn matrix_to_text(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
/// Later duplicates override earlier ones.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", no + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", no + 1)));
        }
        match out.iter_mut().find(|(key, _)| *key == k) {
            Some(slot) => slot.1 = v,
            None => out.push((k, v)),
        }
    }
    Ok(out)
}

pub fn config_to_text(entries: &[(String, String)]) -> String {
    entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundle_round_trip() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -0.1, 1e-300], vec![std::f64::consts::PI, 0.0, -2.5e10]]).unwrap();
        let b = DenseMatrix::column(&[0.1 + 0.2, 7.0]);
        let bundle =
            Bundle::new().with_header("seed", 7).with_header("prng", "x").with_matrix("A", a).with_matrix("b", b);
        let text = bundle.to_text();
        assert_eq!(Bundle::parse(&text).unwrap(), bundle);
        assert_eq!(Bundle::parse(&text).unwrap().to_text(), text);
    }

    #[test]
    fn unnamed_matrix() {
        let b = Bundle::parse("2 1\n1\n2\n").unwrap();
        assert_eq!(b.first().unwrap(), &DenseMatrix::column(&[1.0, 2.0]));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(Bundle::parse("2 2\n1 2\n"), Err(Error::Parse(_))));
        assert!(matches!(Bundle::parse("1 2\n1 x\n"), Err(Error::Parse(_))));
        assert!(matches!(Bundle::parse("1 2\n1 2 3\n"), Err(Error::Parse(_))));
        assert!(matches!(Bundle::parse("1 1\nNaN\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn config_lines() {
        let c = parse_config("# comment\nn = 400\n\nk=8,20\nn=30\n").unwrap();
        assert_eq!(c, vec![("n".to_string(), "30".to_string()), ("k".to_string(), "8,20".to_string())]);
        assert!(parse_config("novalue\n").is_err());
        assert_eq!(parse_config(&config_to_text(&c)).unwrap(), c);
    }
}
