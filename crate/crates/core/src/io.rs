//! Plain-text matrix dumps for debugging.
//!
//! One matrix row per line, entries separated by single spaces, each entry
//! written as `re+imi` (or `re-imi`) using the shortest round-trip decimal
//! form of both parts.

use nalgebra::{DMatrix, Dim, Matrix, RawStorage};

use crate::error::{Error, Result};
use crate::operators::C64;

pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

pub fn parse_complex(token: &str) -> Result<C64> {
    let bad = || Error::Numeric(format!("malformed complex token `{token}`"));
    let body = token.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    // split at the last sign that is not the sign of the real part or an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

/// Row-major dump of a complex matrix.
pub fn dump_matrix<R: Dim, C: Dim, S: RawStorage<C64, R, C>>(m: &Matrix<C64, R, C, S>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<C64>> {
    let rows: Vec<Vec<C64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(parse_complex).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Numeric("ragged matrix dump".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}
