//! Number formatting and the 4×4 complex matrix file format.
//!
//! A matrix file holds four non-empty lines of four whitespace-separated
//! entries. Each entry is either `a+bi` (also `a`, `bi`, `-i`, with `j`
//! accepted for `i`) or `(a,b)`. Blank lines and lines starting with `#` are
//! skipped.

use num_complex::Complex64;
use weylsteer_core::qmat::CMat4;

use crate::error::CliError;

/// `%.{digits}g`-style formatting: shortest of fixed and scientific, with
/// trailing zeros removed.
pub fn sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV cells carry twelve significant digits.
pub fn csv_num(v: f64) -> String {
    sig(v, 12)
}

/// Rounds values that are zero up to `tol` to an exact zero (avoids `-0`
/// and `1e-17` noise in human-readable reports).
pub fn clean(v: f64, tol: f64) -> f64 {
    if v.abs() < tol {
        0.0
    } else {
        v
    }
}

pub fn parse_complex(token: &str) -> Result<Complex64, String> {
    let t = token.trim();
    if let Some(inner) = t.strip_prefix('(') {
        let inner = inner.strip_suffix(')').ok_or_else(|| format!("unclosed parenthesis in {t:?}"))?;
        let (re, im) = inner.split_once(',').ok_or_else(|| format!("expected (re,im), got {t:?}"))?;
        return Ok(Complex64::new(parse_real(re)?, parse_real(im)?));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(parse_real(t)?, 0.0));
    };
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, parse_imag(&body[k..])?),
        None => (0.0, parse_imag(body)?),
    };
    Ok(Complex64::new(re, im))
}

fn parse_real(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("not a number: {:?}", s.trim()))
}

fn parse_imag(s: &str) -> Result<f64, String> {
    match s.trim() {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => parse_real(other),
    }
}

pub fn parse_matrix(text: &str) -> Result<CMat4, CliError> {
    let mut m = CMat4::zeros();
    let mut row = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| CliError::Parse { line: Some(lineno + 1), message };
        if row == 4 {
            return Err(parse_err("more than four matrix rows".into()));
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(parse_err(format!("expected 4 entries, found {}", tokens.len())));
        }
        for (col, tok) in tokens.iter().enumerate() {
            m[(row, col)] = parse_complex(tok).map_err(parse_err)?;
        }
        row += 1;
    }
    if row != 4 {
        return Err(CliError::Parse { line: None, message: format!("expected 4 matrix rows, found {row}") });
    }
    Ok(m)
}

/// Matrix in `(a,b)` form with 17 significant digits.
pub fn format_matrix(m: &CMat4) -> String {
    let mut out = String::new();
    for r in 0..4 {
        let cells: Vec<String> = (0..4).map(|c| format!("({},{})", sig(m[(r, c)].re, 17), sig(m[(r, c)].im, 17))).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
