//! Pauli-operator algebra.
//!
//! A [`PauliOperator`] is a canonical sum of weighted [`PauliString`]s: at
//! most one term per string, with coefficients below [`PRUNE_TOL`] removed.
//! Dense matrices follow the crate-wide convention that qubit 0 is the
//! leftmost Kronecker factor, so in a register of `n` qubits qubit `q` is
//! bit `n - 1 - q` of a basis-state index.

mod observe;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::DenseMatrix;

pub use observe::{expectation_from_counts, observe, CountWeight, ObservedCircuits};
pub use parse::parse_hamiltonian;

/// Coefficients with modulus below this are dropped on canonicalization.
pub const PRUNE_TOL: f64 = 1e-14;
/// Imaginary parts up to this size still count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest register [`PauliOperator::to_matrix`] will build.
pub const MAX_MATRIX_QUBITS: usize = 12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PauliError {
    #[error("malformed Pauli term `{token}`: {reason}")]
    Malformed { token: String, reason: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<PauliError>,
    },
    #[error("dense matrices are limited to {MAX_MATRIX_QUBITS} qubits, requested {0}")]
    TooManyQubits(usize),
    #[error("operator acts on qubit {qubit} but the register has {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("state vector has length {found}, expected {expected}")]
    StateLength { expected: usize, found: usize },
    #[error("observable is not Hermitian")]
    NotHermitian,
    #[error("circuit `{0}` already contains measurements")]
    AlreadyMeasured(String),
    #[error("measurement counts are empty")]
    EmptyCounts,
    #[error("bitstring `{bits}` does not cover qubit {qubit}")]
    BitstringTooShort { bits: String, qubit: usize },
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `self * other = phase * result`, with `None` standing for identity.
    fn mul(self, other: Pauli) -> (Complex64, Option<Pauli>) {
        use Pauli::*;
        let one = Complex64::new(1.0, 0.0);
        match (self, other) {
            (a, b) if a == b => (one, None),
            (X, Y) => (I, Some(Z)),
            (Y, Z) => (I, Some(X)),
            (Z, X) => (I, Some(Y)),
            (Y, X) => (-I, Some(Z)),
            (Z, Y) => (-I, Some(X)),
            (X, Z) => (-I, Some(Y)),
            _ => unreachable!(),
        }
    }
}

/// Tensor product of single-qubit Paulis, sorted by qubit, identities
/// implicit. The empty string is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliString {
    ops: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn identity() -> Self {
        PauliString::default()
    }

    /// Builds a string from `(qubit, letter)` pairs in any order. Repeated
    /// qubits are multiplied left to right; the accumulated phase is
    /// returned alongside.
    pub fn from_ops(ops: impl IntoIterator<Item = (usize, Pauli)>) -> (Complex64, Self) {
        let mut phase = Complex64::new(1.0, 0.0);
        let mut out = PauliString::identity();
        for (q, p) in ops {
            let (ph, s) = out.mul(&PauliString { ops: vec![(q, p)] });
            phase *= ph;
            out = s;
        }
        (phase, out)
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        PauliString { ops: vec![(q, p)] }
    }

    pub fn ops(&self) -> &[(usize, Pauli)] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.ops.len()
    }

    pub fn support(&self) -> Vec<usize> {
        self.ops.iter().map(|&(q, _)| q).collect()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.last().map(|&(q, _)| q)
    }

    pub fn letter(&self, q: usize) -> Option<Pauli> {
        self.ops
            .binary_search_by_key(&q, |&(k, _)| k)
            .ok()
            .map(|i| self.ops[i].1)
    }

    /// Product `self * other = phase * string`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        let mut phase = Complex64::new(1.0, 0.0);
        let mut ops = Vec::with_capacity(self.ops.len() + other.ops.len());
        let (mut i, mut j) = (0, 0);
        while i < self.ops.len() || j < other.ops.len() {
            match (self.ops.get(i), other.ops.get(j)) {
                (Some(&(qa, a)), Some(&(qb, b))) if qa == qb => {
                    let (ph, r) = a.mul(b);
                    phase *= ph;
                    if let Some(r) = r {
                        ops.push((qa, r));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(qa, a)), Some(&(qb, _))) if qa < qb => {
                    ops.push((qa, a));
                    i += 1;
                }
                (Some(&(qa, a)), None) => {
                    ops.push((qa, a));
                    i += 1;
                }
                (_, Some(&(qb, b))) => {
                    ops.push((qb, b));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        (phase, PauliString { ops })
    }

    /// True when the two strings commute.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut anti = 0;
        for &(q, a) in &self.ops {
            if let Some(b) = other.letter(q) {
                if a != b {
                    anti += 1;
                }
            }
        }
        anti % 2 == 0
    }

    /// Bit masks `(flip, phase)` over an `n`-qubit index: X and Y flip a
    /// bit, Z and Y contribute a sign; also returns the number of Ys.
    pub fn masks(&self, n: usize) -> (usize, usize, usize) {
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0usize);
        for &(q, p) in &self.ops {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return f.write_str("I");
        }
        for (k, (q, p)) in self.ops.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", p.as_char(), q)?;
        }
        Ok(())
    }
}

/// `i^k` for small non-negative `k`.
fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// One weighted Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coefficient: Complex64,
}

impl PauliTerm {
    pub fn new(string: PauliString, coefficient: Complex64) -> Self {
        PauliTerm {
            string,
            coefficient,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.string.is_identity()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_coefficient(f, self.coefficient)?;
        if !self.string.is_identity() {
            write!(f, " {}", self.string)?;
        }
        Ok(())
    }
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else {
        write!(f, "({},{})", c.re, c.im)
    }
}

/// Canonical sum of weighted Pauli strings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliOperator {
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliOperator {
    /// The zero operator.
    pub fn zero() -> Self {
        PauliOperator::default()
    }

    pub fn identity(c: impl Into<Complex64>) -> Self {
        Self::from_term(PauliString::identity(), c.into())
    }

    pub fn from_term(string: PauliString, coefficient: Complex64) -> Self {
        let mut op = PauliOperator::zero();
        op.add_term(string, coefficient);
        op
    }

    /// Convenience constructor: `coef * prod letters`, e.g.
    /// `PauliOperator::term(0.5, "X0 Y1")`. Panics on a malformed string.
    pub fn term(coef: impl Into<Complex64>, ops: &str) -> Self {
        let s = format!("1 {ops}");
        let base: PauliOperator = s.parse().expect("well-formed Pauli string");
        base.scale(coef.into())
    }

    /// Single-qubit term `coef * P_q`.
    pub fn single(q: usize, p: Pauli, coef: impl Into<Complex64>) -> Self {
        Self::from_term(PauliString::single(q, p), coef.into())
    }

    /// Adds `c * string` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, string: PauliString, c: Complex64) {
        let entry = self.terms.entry(string.clone()).or_default();
        *entry += c;
        if entry.norm() < PRUNE_TOL {
            self.terms.remove(&string);
        }
    }

    /// Drops every term with `|c| < tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic) order; identity first.
    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(s, &c)| PauliTerm::new(s.clone(), c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn identity_coefficient(&self) -> Complex64 {
        self.coefficient(&PauliString::identity())
    }

    /// Register size needed: largest qubit index plus one.
    pub fn n_qubits(&self) -> usize {
        self.terms
            .keys()
            .filter_map(PauliString::max_qubit)
            .max()
            .map_or(0, |m| m + 1)
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() <= HERMITIAN_TOL)
    }

    /// True when every coefficient is purely imaginary, i.e. the operator is
    /// anti-Hermitian.
    pub fn is_anti_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.re.abs() <= HERMITIAN_TOL)
    }

    pub fn adjoint(&self) -> Self {
        PauliOperator {
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c.conj())).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = PauliOperator::zero();
        for (s, &v) in &self.terms {
            let w = v * c;
            if w.norm() >= PRUNE_TOL {
                out.terms.insert(s.clone(), w);
            }
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &PauliOperator) -> PauliOperator {
        let mut out = PauliOperator::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                if a.commutes_with(b) {
                    continue;
                }
                // For anticommuting strings ab = -ba, so [a, b] = 2ab.
                let (ph, s) = a.mul(b);
                *out.terms.entry(s).or_default() += 2.0 * ph * ca * cb;
            }
        }
        out.prune(PRUNE_TOL);
        out
    }

    /// `self * other + other * self`.
    pub fn anticommutator(&self, other: &PauliOperator) -> PauliOperator {
        &(self * other) + &(other * self)
    }

    /// Applies the operator to an `n`-qubit state vector.
    pub fn apply(&self, state: &[Complex64], n: usize) -> Result<Vec<Complex64>, PauliError> {
        self.check_state(state, n)?;
        let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
        for (s, &c) in &self.terms {
            let (x, z, ny) = s.masks(n);
            let f = c * i_pow(ny);
            for (j, &amp) in state.iter().enumerate() {
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                out[j ^ x] += f * sign * amp;
            }
        }
        Ok(out)
    }

    /// `<psi| self |psi>` for an `n`-qubit state vector.
    pub fn expectation(&self, state: &[Complex64], n: usize) -> Result<Complex64, PauliError> {
        self.check_state(state, n)?;
        let mut total = Complex64::new(0.0, 0.0);
        for (s, &c) in &self.terms {
            total += c * string_expectation(s, state, n);
        }
        Ok(total)
    }

    fn check_state(&self, state: &[Complex64], n: usize) -> Result<(), PauliError> {
        if let Some(q) = self.terms.keys().filter_map(PauliString::max_qubit).max() {
            if q >= n {
                return Err(PauliError::QubitOutOfRange { qubit: q, n });
            }
        }
        if state.len() != 1usize << n {
            return Err(PauliError::StateLength {
                expected: 1usize << n,
                found: state.len(),
            });
        }
        Ok(())
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn to_matrix(&self, n: usize) -> Result<DenseMatrix, PauliError> {
        if n > MAX_MATRIX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        if let Some(q) = self.terms.keys().filter_map(PauliString::max_qubit).max() {
            if q >= n {
                return Err(PauliError::QubitOutOfRange { qubit: q, n });
            }
        }
        let dim = 1usize << n;
        let mut m = DenseMatrix::zeros(dim, dim);
        for (s, &c) in &self.terms {
            let (x, z, ny) = s.masks(n);
            let f = c * i_pow(ny);
            for j in 0..dim {
                let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[(j ^ x, j)] += f * sign;
            }
        }
        Ok(m)
    }

    /// Largest coefficient modulus difference against `other`.
    pub fn max_coefficient_diff(&self, other: &PauliOperator) -> f64 {
        let diff = self - other;
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `<psi| P |psi>` for a single Pauli string.
pub(crate) fn string_expectation(s: &PauliString, state: &[Complex64], n: usize) -> Complex64 {
    let (x, z, ny) = s.masks(n);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &amp) in state.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += state[j ^ x].conj() * amp * sign;
    }
    acc * i_pow(ny)
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl Add for &PauliOperator {
    type Output = PauliOperator;
    fn add(self, rhs: &PauliOperator) -> PauliOperator {
        let mut out = self.clone();
        for (s, &c) in &rhs.terms {
            *out.terms.entry(s.clone()).or_default() += c;
        }
        out.prune(PRUNE_TOL);
        out
    }
}

impl Sub for &PauliOperator {
    type Output = PauliOperator;
    fn sub(self, rhs: &PauliOperator) -> PauliOperator {
        self + &(-rhs)
    }
}

impl Neg for &PauliOperator {
    type Output = PauliOperator;
    fn neg(self) -> PauliOperator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &PauliOperator {
    type Output = PauliOperator;
    fn mul(self, rhs: &PauliOperator) -> PauliOperator {
        let mut out = PauliOperator::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                let (ph, s) = a.mul(b);
                *out.terms.entry(s).or_default() += ph * ca * cb;
            }
        }
        out.prune(PRUNE_TOL);
        out
    }
}

impl Mul<Complex64> for &PauliOperator {
    type Output = PauliOperator;
    fn mul(self, rhs: Complex64) -> PauliOperator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &PauliOperator {
    type Output = PauliOperator;
    fn mul(self, rhs: f64) -> PauliOperator {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for PauliOperator {
            type Output = PauliOperator;
            fn $f(self, rhs: PauliOperator) -> PauliOperator {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&PauliOperator> for PauliOperator {
            type Output = PauliOperator;
            fn $f(self, rhs: &PauliOperator) -> PauliOperator {
                (&self).$f(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl std::ops::AddAssign<&PauliOperator> for PauliOperator {
    fn add_assign(&mut self, rhs: &PauliOperator) {
        for (s, &c) in &rhs.terms {
            *self.terms.entry(s.clone()).or_default() += c;
        }
        self.prune(PRUNE_TOL);
    }
}

impl std::ops::AddAssign for PauliOperator {
    fn add_assign(&mut self, rhs: PauliOperator) {
        *self += &rhs;
    }
}

impl std::iter::Sum for PauliOperator {
    fn sum<It: Iterator<Item = PauliOperator>>(iter: It) -> Self {
        let mut acc = PauliOperator::zero();
        for op in iter {
            acc += &op;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn addition_and_cancellation() {
        let z0 = PauliOperator::term(1.0, "Z0");
        assert_eq!(&z0 + &z0, PauliOperator::term(2.0, "Z0"));
        assert!((&z0 - &z0).is_empty());
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliOperator::term(1.0, "X0");
        let y = PauliOperator::term(1.0, "Y0");
        let z = PauliOperator::term(1.0, "Z0");
        assert_eq!(&x * &y, PauliOperator::term(c(0.0, 1.0), "Z0"));
        assert_eq!(&z * &z, PauliOperator::identity(1.0));
        let xx = PauliOperator::term(1.0, "X0 X1");
        let yy = PauliOperator::term(1.0, "Y0 Y1");
        assert_eq!(&xx * &yy, PauliOperator::term(-1.0, "Z0 Z1"));
    }

    #[test]
    fn commutators() {
        let z0 = PauliOperator::term(1.0, "Z0");
        let z1 = PauliOperator::term(1.0, "Z1");
        assert!(z0.commutator(&z1).is_empty());
        let x = PauliOperator::term(1.0, "X0");
        let y = PauliOperator::term(1.0, "Y0");
        assert_eq!(x.commutator(&y), PauliOperator::term(c(0.0, 2.0), "Z0"));
    }

    #[test]
    fn scalar_multiplication() {
        let z = PauliOperator::term(1.0, "Z0");
        assert_eq!(&z * 2.0, PauliOperator::term(2.0, "Z0"));
        assert!((&z * 0.0).is_empty());
        assert!(!(&z * c(0.0, 1.0)).is_hermitian());
    }

    #[test]
    fn canonical_labels() {
        let op = PauliOperator::term(1.0, "Z1 X0");
        let t = op.terms().next().unwrap();
        assert_eq!(t.string.to_string(), "X0 Z1");
        assert_eq!(PauliString::identity().to_string(), "I");
    }

    #[test]
    fn small_matrices() {
        assert_eq!(
            PauliOperator::identity(1.0).to_matrix(1).unwrap(),
            DenseMatrix::identity(2)
        );
        assert_eq!(
            PauliOperator::term(1.0, "Z0").to_matrix(1).unwrap(),
            DenseMatrix::from_diagonal(&[1.0, -1.0])
        );
        // Z on qubit 0 of two qubits is diag(1, 1, -1, -1).
        assert_eq!(
            PauliOperator::term(1.0, "Z0").to_matrix(2).unwrap(),
            DenseMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0])
        );
        assert!(matches!(
            PauliOperator::term(1.0, "Z3").to_matrix(2),
            Err(PauliError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            PauliOperator::identity(1.0).to_matrix(13),
            Err(PauliError::TooManyQubits(13))
        ));
    }

    #[test]
    fn apply_matches_matrix() {
        let op = &PauliOperator::term(0.3, "X0 Y1") + &PauliOperator::term(c(0.1, -0.2), "Z1");
        let state = vec![c(0.1, 0.2), c(-0.3, 0.0), c(0.5, 0.5), c(0.0, -0.4)];
        let a = op.apply(&state, 2).unwrap();
        let b = op.to_matrix(2).unwrap().mat_vec(&state).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-15);
        }
    }
}
