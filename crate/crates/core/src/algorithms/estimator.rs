//! Expectation values for the algorithms, exact or sampled.

use num_complex::Complex64;

use super::AlgorithmError;
use crate::backend::{self, Accelerator, BackendError};
use crate::ir::CompositeInstruction;
use crate::pauli::PauliOperator;

/// A state ready for repeated expectation queries.
pub(crate) enum Prepared {
    /// Exact mode: the final statevector.
    State(Vec<Complex64>),
    /// Sampled mode, or a backend without statevector access.
    Circuit(CompositeInstruction),
}

impl Prepared {
    pub fn state(&self) -> Option<&[Complex64]> {
        match self {
            Prepared::State(s) => Some(s),
            Prepared::Circuit(_) => None,
        }
    }
}

pub(crate) struct Estimator<'a> {
    acc: &'a dyn Accelerator,
    n: usize,
}

impl<'a> Estimator<'a> {
    pub fn new(acc: &'a dyn Accelerator, n: usize) -> Self {
        Estimator { acc, n }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn prepare(&self, circuit: &CompositeInstruction) -> Result<Prepared, AlgorithmError> {
        if !circuit.is_concrete() {
            return Err(BackendError::Symbolic(circuit.name().to_string()).into());
        }
        if self.acc.config().is_exact() {
            match self.acc.statevector(circuit, self.n) {
                Ok(s) => return Ok(Prepared::State(s)),
                Err(BackendError::Unsupported(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(Prepared::Circuit(circuit.clone()))
    }

    /// `<psi|op|psi>`; a non-Hermitian `op` is measured as two Hermitian
    /// parts in sampled mode.
    pub fn expect(&self, p: &Prepared, op: &PauliOperator) -> Result<Complex64, AlgorithmError> {
        match p {
            Prepared::State(s) => Ok(op.expectation(s, self.n)?),
            Prepared::Circuit(c) => {
                if op.is_hermitian() {
                    return Ok(backend::expectation(op, c, self.acc)?.into());
                }
                let adj = op.adjoint();
                let re = (op + &adj).scale(Complex64::new(0.5, 0.0));
                let im = (op - &adj).scale(Complex64::new(0.0, -0.5));
                Ok(Complex64::new(
                    backend::expectation(&re, c, self.acc)?,
                    backend::expectation(&im, c, self.acc)?,
                ))
            }
        }
    }

    /// Real expectation of a Hermitian operator.
    pub fn energy(&self, op: &PauliOperator, circuit: &CompositeInstruction) -> Result<f64, AlgorithmError> {
        let p = self.prepare(circuit)?;
        Ok(self.expect(&p, op)?.re)
    }
}
