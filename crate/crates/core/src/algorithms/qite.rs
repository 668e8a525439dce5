//! Quantum imaginary time evolution.

use std::sync::Arc;

use num_complex::Complex64;

use super::estimator::{Estimator, Prepared};
use super::{accelerator, concrete_ansatz, count_option, hermitian_observable, invalid, real_option, Algorithm, AlgorithmError};
use crate::ansatz::append_exp_pauli;
use crate::backend::{Accelerator, AcceleratorBuffer};
use crate::ir::{CompositeInstruction, Parameter};
use crate::linalg::{inner, solve_regularized_lsq, DenseMatrix};
use crate::pauli::{Pauli, PauliOperator, PauliString};
use crate::registry::HeterogeneousMap;

const DEFAULT_RIDGE: f64 = 1e-8;
/// Largest register for which the default basis spans every Pauli string.
const FULL_BASIS_QUBITS: usize = 4;

/// All non-identity Pauli strings on `n` qubits with weight at most
/// `max_weight`, in lexicographic order of (qubit, letter).
pub fn pauli_basis(n: usize, max_weight: usize) -> Vec<PauliString> {
    let letters = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];
    let mut out = Vec::new();
    let total = 4usize.pow(n as u32);
    for code in 1..total {
        let mut ops = Vec::new();
        let mut c = code;
        for q in (0..n).rev() {
            if let Some(p) = letters[c % 4] {
                ops.push((q, p));
            }
            c /= 4;
        }
        if ops.len() <= max_weight {
            out.push(PauliString::from_ops(ops).1);
        }
    }
    out
}

struct Config {
    observable: Arc<PauliOperator>,
    accelerator: Arc<dyn Accelerator>,
    ansatz: CompositeInstruction,
    step_size: f64,
    steps: usize,
    basis_weight: Option<usize>,
    ridge: f64,
}

/// Quantum imaginary time evolution with least-squares unitary steps.
///
/// Options: `accelerator`, `observable`, `step-size` (positive real or
/// integer), `steps` (at least 1), `ansatz` (initial state; bound with
/// `ansatz-parameters` if symbolic), optional `basis-weight` (maximum
/// Pauli weight of the generator basis; default: all strings for up to 4
/// qubits, weight 2 above) and `ridge` (default 1e-8).
///
/// Each step replaces `e^{-db H}|psi>/norm` by `e^{-i db A}|psi>` with
/// `A = sum_I a_I sigma_I`, where `a` minimizes the residual of
/// `S a = b`, `S_IJ = Re<sigma_I sigma_J>`,
/// `b_I = -Im<H sigma_I> / sqrt(1 - 2 db <H>)`. Writes `energy-history`
/// (initial energy first, `steps + 1` entries) and `opt-val`.
#[derive(Default)]
pub struct Qite {
    config: Option<Config>,
}

impl Algorithm for Qite {
    fn name(&self) -> &str {
        "qite"
    }

    fn initialize(&mut self, options: HeterogeneousMap) -> Result<(), AlgorithmError> {
        let step_size = real_option(&options, "step-size")?.ok_or_else(|| invalid("step-size", "required"))?;
        if !(step_size > 0.0 && step_size.is_finite()) {
            return Err(invalid("step-size", format!("must be positive, got {step_size}")));
        }
        let steps = count_option(&options, "steps")?.ok_or_else(|| invalid("steps", "required"))?;
        if steps == 0 {
            return Err(invalid("steps", "must be at least 1"));
        }
        let basis_weight = count_option(&options, "basis-weight")?;
        if basis_weight == Some(0) {
            return Err(invalid("basis-weight", "must be at least 1"));
        }
        let ridge = real_option(&options, "ridge")?.unwrap_or(DEFAULT_RIDGE);
        if !(ridge >= 0.0) {
            return Err(invalid("ridge", "must be non-negative"));
        }
        self.config = Some(Config {
            observable: hermitian_observable(&options)?,
            accelerator: accelerator(&options)?,
            ansatz: concrete_ansatz(&options)?,
            step_size,
            steps,
            basis_weight,
            ridge,
        });
        Ok(())
    }

    fn execute(&self, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
        let c = self.config.as_ref().ok_or(AlgorithmError::NotInitialized("qite"))?;
        let n = super::register_size(buffer, &c.observable, &c.ansatz)?;
        let weight = c
            .basis_weight
            .unwrap_or(if n <= FULL_BASIS_QUBITS { n } else { 2 })
            .min(n);
        let basis: Vec<PauliOperator> = pauli_basis(n, weight)
            .into_iter()
            .map(|s| PauliOperator::from_term(s, Complex64::new(1.0, 0.0)))
            .collect();
        let est = Estimator::new(c.accelerator.as_ref(), n);
        let h = c.observable.as_ref();
        let db = c.step_size;

        let mut circuit = c.ansatz.clone();
        circuit.set_name("qite");
        let mut state = est.prepare(&circuit)?;
        let mut energy = est.expect(&state, h)?.re;
        let mut history = Vec::with_capacity(c.steps + 1);
        history.push(energy);
        for _ in 0..c.steps {
            let norm2 = 1.0 - 2.0 * db * energy;
            if norm2 <= 0.0 {
                return Err(invalid(
                    "step-size",
                    format!("1 - 2 * step-size * <H> = {norm2} is not positive; use a smaller step"),
                ));
            }
            let (s, b) = linear_system(&est, &state, h, &basis, norm2.sqrt())?;
            let a = solve_regularized_lsq(&s, &b, c.ridge)?;
            let mut generator = PauliOperator::zero();
            for (sigma, ai) in basis.iter().zip(&a) {
                generator += &sigma.scale(Complex64::new(0.0, -ai.re));
            }
            generator.prune(1e-14);
            append_exp_pauli(&mut circuit, &generator, &Parameter::Concrete(db))?;
            state = est.prepare(&circuit)?;
            energy = est.expect(&state, h)?.re;
            history.push(energy);
        }
        buffer.set("opt-val", energy);
        buffer.set("energy-history", history);
        Ok(())
    }
}

fn linear_system(
    est: &Estimator<'_>,
    state: &Prepared,
    h: &PauliOperator,
    basis: &[PauliOperator],
    norm: f64,
) -> Result<(DenseMatrix, Vec<Complex64>), AlgorithmError> {
    let m = basis.len();
    let n = est.n_qubits();
    let mut s = DenseMatrix::zeros(m, m);
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    match state.state() {
        Some(psi) => {
            let vs: Vec<Vec<Complex64>> = basis.iter().map(|o| o.apply(psi, n)).collect::<Result<_, _>>()?;
            let hpsi = h.apply(psi, n)?;
            for i in 0..m {
                for j in i..m {
                    let v = inner(&vs[i], &vs[j]).re;
                    s[(i, j)] = v.into();
                    s[(j, i)] = v.into();
                }
                b[i] = (-inner(&hpsi, &vs[i]).im / norm).into();
            }
        }
        None => {
            for i in 0..m {
                for j in i..m {
                    let v = est.expect(state, &(&basis[i] * &basis[j]))?.re;
                    s[(i, j)] = v.into();
                    s[(j, i)] = v.into();
                }
                b[i] = (-est.expect(state, &(h * &basis[i]))?.im / norm).into();
            }
        }
    }
    Ok((s, b))
}
