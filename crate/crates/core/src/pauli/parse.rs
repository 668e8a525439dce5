//! Text form of Pauli terms and Hamiltonian files.
//!
//! A term is `<coef> [<L><q>]*` where the coefficient is a real literal or a
//! complex pair `(re,im)` and each factor is a letter from `XYZ` followed by
//! a qubit index, e.g. `0.5818 Z0 Z1` or `(0,-0.5) X0 Y1`. A Hamiltonian file
//! holds one term per line; `#` starts a comment and blank lines are
//! skipped. Factors `I<q>` are accepted and ignored.

use std::str::FromStr;

use num_complex::Complex64;

use super::{Pauli, PauliError, PauliOperator, PauliString};

fn malformed(token: &str, reason: impl Into<String>) -> PauliError {
    PauliError::Malformed {
        token: token.to_string(),
        reason: reason.into(),
    }
}

fn parse_real(tok: &str) -> Result<f64, PauliError> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| malformed(tok, "not a real number"))?;
    if !v.is_finite() {
        return Err(malformed(tok, "coefficient must be finite"));
    }
    Ok(v)
}

/// Splits the leading coefficient off a term, returning it and the rest.
fn split_coefficient(s: &str) -> Result<(Complex64, &str), PauliError> {
    let s = s.trim_start();
    if let Some(rest) = s.strip_prefix('(') {
        let close = rest
            .find(')')
            .ok_or_else(|| malformed(s, "unterminated complex coefficient"))?;
        let inner = &rest[..close];
        let (re, im) = inner
            .split_once(',')
            .ok_or_else(|| malformed(inner, "complex coefficient must be `(re,im)`"))?;
        Ok((
            Complex64::new(parse_real(re)?, parse_real(im)?),
            &rest[close + 1..],
        ))
    } else {
        let end = s.find(char::is_whitespace).unwrap_or(s.len());
        Ok((Complex64::new(parse_real(&s[..end])?, 0.0), &s[end..]))
    }
}

fn parse_factor(tok: &str) -> Result<Option<(usize, Pauli)>, PauliError> {
    let mut chars = tok.chars();
    let letter = chars.next().ok_or_else(|| malformed(tok, "empty factor"))?;
    let idx = chars.as_str();
    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(tok, "expected a Pauli letter followed by a qubit index"));
    }
    let q: usize = idx
        .parse()
        .map_err(|_| malformed(tok, "qubit index out of range"))?;
    match letter {
        'I' => Ok(None),
        c => Pauli::from_char(c)
            .map(|p| Some((q, p)))
            .ok_or_else(|| malformed(tok, "Pauli letter must be one of X, Y, Z")),
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Parses a single term such as `0.0896 X0 X1`.
    fn from_str(s: &str) -> Result<Self, PauliError> {
        if s.trim().is_empty() {
            return Err(malformed(s, "empty term"));
        }
        let (coef, rest) = split_coefficient(s)?;
        let mut factors = Vec::new();
        for tok in rest.split_whitespace() {
            if let Some(f) = parse_factor(tok)? {
                factors.push(f);
            }
        }
        let (phase, string) = PauliString::from_ops(factors);
        Ok(PauliOperator::from_term(string, coef * phase))
    }
}

/// Parses a Hamiltonian file: one term per line, summed.
pub fn parse_hamiltonian(text: &str) -> Result<PauliOperator, PauliError> {
    let mut op = PauliOperator::zero();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let term: PauliOperator = line.parse().map_err(|e| PauliError::AtLine {
            line: k + 1,
            source: Box::new(e),
        })?;
        op += &term;
    }
    Ok(op)
}
