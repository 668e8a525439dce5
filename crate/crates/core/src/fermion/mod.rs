//! Second-quantized fermionic operators and the Jordan-Wigner transform.
//!
//! Modes map one-to-one onto qubits. The parity string of mode `p` is
//! `Z_0 ... Z_{p-1}`, and `|1>` on a qubit means the mode is occupied:
//!
//! * `a_p  -> Z_0..Z_{p-1} (X_p + i Y_p) / 2`
//! * `a†_p -> Z_0..Z_{p-1} (X_p - i Y_p) / 2`

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::pauli::{Pauli, PauliOperator, PauliString};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FermionError {
    #[error("mode {mode} is out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("occupied and virtual index sets overlap at mode {0}")]
    Overlap(usize),
    #[error("excitations must have rank 1 or 2 with matching lengths, got {occ} occupied and {virt} virtual")]
    BadRank { occ: usize, virt: usize },
    #[error("repeated mode {0} in excitation")]
    Repeated(usize),
}

/// Ordered product of ladder operators with a coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    /// `(mode, is_creation)`, leftmost factor first.
    pub ops: Vec<(usize, bool)>,
    pub coefficient: Complex64,
}

impl fmt::Display for FermionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}i)", self.coefficient.re, self.coefficient.im)?;
        for &(p, dag) in &self.ops {
            write!(f, " a{}{}", if dag { "+" } else { "" }, p)?;
        }
        Ok(())
    }
}

/// Sum of [`FermionTerm`]s. Terms are not reordered or combined beyond
/// dropping zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FermionOperator {
    terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(ops: Vec<(usize, bool)>, coefficient: impl Into<Complex64>) -> Self {
        let mut f = Self::zero();
        f.add_term(ops, coefficient);
        f
    }

    pub fn creation(p: usize) -> Self {
        Self::from_term(vec![(p, true)], 1.0)
    }

    pub fn annihilation(p: usize) -> Self {
        Self::from_term(vec![(p, false)], 1.0)
    }

    /// `a†_p a_p`.
    pub fn number(p: usize) -> Self {
        Self::from_term(vec![(p, true), (p, false)], 1.0)
    }

    pub fn add_term(&mut self, ops: Vec<(usize, bool)>, coefficient: impl Into<Complex64>) {
        let coefficient = coefficient.into();
        if coefficient.norm() != 0.0 {
            self.terms.push(FermionTerm { ops, coefficient });
        }
    }

    pub fn terms(&self) -> &[FermionTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest mode index plus one.
    pub fn n_modes(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.ops.iter().map(|&(p, _)| p + 1))
            .max()
            .unwrap_or(0)
    }

    /// Hermitian conjugate: reversed factor order, daggers toggled,
    /// coefficients conjugated.
    pub fn adjoint(&self) -> Self {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|t| FermionTerm {
                    ops: t.ops.iter().rev().map(|&(p, d)| (p, !d)).collect(),
                    coefficient: t.coefficient.conj(),
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero();
        for t in &self.terms {
            out.add_term(t.ops.clone(), t.coefficient * c);
        }
        out
    }

    /// Concatenation of the term lists.
    pub fn plus(&self, other: &FermionOperator) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn minus(&self, other: &FermionOperator) -> Self {
        self.plus(&other.scale(-1.0))
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Jordan-Wigner image of one ladder operator.
pub fn jw_ladder(p: usize, creation: bool) -> PauliOperator {
    let z: Vec<(usize, Pauli)> = (0..p).map(|q| (q, Pauli::Z)).collect();
    let mut xs = z.clone();
    xs.push((p, Pauli::X));
    let mut ys = z;
    ys.push((p, Pauli::Y));
    let (_, x) = PauliString::from_ops(xs);
    let (_, y) = PauliString::from_ops(ys);
    let sign = if creation { -0.5 } else { 0.5 };
    let mut op = PauliOperator::from_term(x, Complex64::new(0.5, 0.0));
    op.add_term(y, Complex64::new(0.0, sign));
    op
}

/// Maps a fermionic operator on `n_modes` modes to qubits.
pub fn jordan_wigner(f: &FermionOperator, n_modes: usize) -> Result<PauliOperator, FermionError> {
    JordanWigner::new(n_modes).transform(f)
}

/// Jordan-Wigner transform with the ladder images precomputed, for mapping
/// many operators on the same register.
#[derive(Debug, Clone)]
pub struct JordanWigner {
    n_modes: usize,
    /// `ladders[p] = [a_p, a†_p]`
    ladders: Vec<[PauliOperator; 2]>,
}

impl JordanWigner {
    pub fn new(n_modes: usize) -> Self {
        JordanWigner {
            n_modes,
            ladders: (0..n_modes)
                .map(|p| [jw_ladder(p, false), jw_ladder(p, true)])
                .collect(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn transform(&self, f: &FermionOperator) -> Result<PauliOperator, FermionError> {
        let mut out = PauliOperator::zero();
        for t in &f.terms {
            let mut prod = PauliOperator::identity(t.coefficient);
            for &(p, dag) in &t.ops {
                let ladder = self.ladders.get(p).ok_or(FermionError::ModeOutOfRange {
                    mode: p,
                    n_modes: self.n_modes,
                })?;
                prod = &prod * &ladder[dag as usize];
            }
            out += &prod;
        }
        Ok(out)
    }
}

/// Fermion-to-qubit mapping service.
pub trait ObservableTransform: Send + Sync {
    fn name(&self) -> &str;
    fn transform(&self, op: &FermionOperator, n_modes: usize) -> Result<PauliOperator, FermionError>;
}

/// The `jw` transform service.
#[derive(Debug, Clone, Copy, Default)]
pub struct JordanWignerTransform;

impl ObservableTransform for JordanWignerTransform {
    fn name(&self) -> &str {
        "jw"
    }
    fn transform(&self, op: &FermionOperator, n_modes: usize) -> Result<PauliOperator, FermionError> {
        jordan_wigner(op, n_modes)
    }
}

/// A named anti-Hermitian excitation generator `T - T†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Excitation {
    pub occupied: Vec<usize>,
    pub virtuals: Vec<usize>,
    /// Name of the amplitude multiplying the generator.
    pub symbol: String,
    pub generator: FermionOperator,
}

/// Builds `T - T†` with `T = a†_{v0} a_{o0}` (single) or
/// `T = a†_{v0} a†_{v1} a_{o1} a_{o0}` (double). The generator carries unit
/// coefficient; `coeff_symbol` names its amplitude.
pub fn anti_hermitian_excitation(
    occ: &[usize],
    virt: &[usize],
    coeff_symbol: &str,
) -> Result<Excitation, FermionError> {
    if occ.len() != virt.len() || !(1..=2).contains(&occ.len()) {
        return Err(FermionError::BadRank {
            occ: occ.len(),
            virt: virt.len(),
        });
    }
    for set in [occ, virt] {
        if set.len() == 2 && set[0] == set[1] {
            return Err(FermionError::Repeated(set[0]));
        }
    }
    if let Some(&p) = occ.iter().find(|p| virt.contains(p)) {
        return Err(FermionError::Overlap(p));
    }
    let mut ops: Vec<(usize, bool)> = virt.iter().map(|&v| (v, true)).collect();
    ops.extend(occ.iter().rev().map(|&o| (o, false)));
    let t = FermionOperator::from_term(ops, 1.0);
    Ok(Excitation {
        occupied: occ.to_vec(),
        virtuals: virt.to_vec(),
        symbol: coeff_symbol.to_string(),
        generator: t.minus(&t.adjoint()),
    })
}
