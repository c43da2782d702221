//! Plain-text sample and coefficient files.
//!
//! * real: one decimal per line
//! * complex: `re,im` per line
//! * block: comma-separated rows of 16 decimals, 16 rows per block
//!
//! Blank lines and lines starting with `#` are ignored. Line numbers in
//! errors are 1-based.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numerics::{quantize, ComplexFixed, FixedPoint, QFormat};

pub const BLOCK_SIZE: usize = 16;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number(line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("not a number: {:?}", field.trim())))?;
    if !v.is_finite() {
        return Err(parse_err(line, "non-finite value"));
    }
    Ok(v)
}

fn row(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split(',').map(|f| number(line, f)).collect()
}

/// Values with the line each came from.
pub fn parse_reals(text: &str) -> Result<Vec<(usize, f64)>> {
    lines(text).map(|(n, l)| Ok((n, number(n, l)?))).collect()
}

pub fn parse_complex(text: &str) -> Result<Vec<(usize, f64, f64)>> {
    lines(text)
        .map(|(n, l)| match row(n, l)?.as_slice() {
            [re, im] => Ok((n, *re, *im)),
            other => Err(parse_err(n, format!("expected re,im, found {} fields", other.len()))),
        })
        .collect()
}

/// Rows of exactly 16 values.
pub fn parse_rows(text: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    lines(text)
        .map(|(n, l)| {
            let r = row(n, l)?;
            if r.len() != BLOCK_SIZE {
                return Err(parse_err(n, format!("expected {BLOCK_SIZE} values, found {}", r.len())));
            }
            Ok((n, r))
        })
        .collect()
}

/// Groups rows into 16x16 blocks.
pub fn parse_blocks(text: &str) -> Result<Vec<Vec<Vec<f64>>>> {
    let rows = parse_rows(text)?;
    if rows.len() % BLOCK_SIZE != 0 {
        let last = rows.last().map_or(0, |r| r.0);
        return Err(parse_err(last, format!("{} rows do not form whole 16-row blocks", rows.len())));
    }
    Ok(rows
        .chunks(BLOCK_SIZE)
        .map(|c| c.iter().map(|(_, r)| r.clone()).collect())
        .collect())
}

/// Rounds a value from line `line` into `format`. The most negative code
/// (`-1` in Q1.7) is accepted as written.
pub fn fixed(line: usize, v: f64, format: QFormat) -> Result<FixedPoint> {
    if v == format.min_raw() as f64 * format.lsb() {
        return FixedPoint::from_raw(format.min_raw(), format);
    }
    quantize(v, format).map_err(|_| parse_err(line, format!("{v} does not fit in {format}")))
}

pub fn reals_to_fixed(values: &[(usize, f64)], format: QFormat) -> Result<Vec<FixedPoint>> {
    values.iter().map(|&(n, v)| fixed(n, v, format)).collect()
}

pub fn complex_to_fixed(values: &[(usize, f64, f64)], format: QFormat) -> Result<Vec<ComplexFixed>> {
    values
        .iter()
        .map(|&(n, re, im)| ComplexFixed::new(fixed(n, re, format)?, fixed(n, im, format)?))
        .collect()
}

/// Parses `Qm.n`.
pub fn parse_qformat(s: &str) -> Result<QFormat> {
    let bad = || parse_err(0, format!("not a Q format: {s:?}"));
    let body = s.trim().strip_prefix('Q').or_else(|| s.trim().strip_prefix('q')).ok_or_else(bad)?;
    let (m, n) = body.split_once('.').ok_or_else(bad)?;
    let m: u8 = m.parse().map_err(|_| bad())?;
    let n: u8 = n.parse().map_err(|_| bad())?;
    QFormat::new(m, n)
}

pub fn format_reals(values: &[FixedPoint]) -> String {
    let mut s = String::new();
    for v in values {
        let _ = writeln!(s, "{}", v.value());
    }
    s
}

pub fn format_complex(values: &[ComplexFixed]) -> String {
    let mut s = String::new();
    for z in values {
        let _ = writeln!(s, "{},{}", z.re().value(), z.im().value());
    }
    s
}

pub fn format_rows(rows: &[Vec<FixedPoint>]) -> String {
    let mut s = String::new();
    for r in rows {
        let fields: Vec<String> = r.iter().map(|v| v.value().to_string()).collect();
        let _ = writeln!(s, "{}", fields.join(","));
    }
    s
}
