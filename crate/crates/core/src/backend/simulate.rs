//! Dense statevector kernels.

use num_complex::Complex64;

use super::{BackendError, MAX_QUBITS};
use crate::ir::{gate_matrix, CompositeInstruction, Gate, Instruction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `|0...0>` on `n` qubits.
pub fn zero_state(n: usize) -> Result<Vec<Complex64>, BackendError> {
    if n > MAX_QUBITS {
        return Err(BackendError::TooManyQubits { n, max: MAX_QUBITS });
    }
    let mut s = vec![ZERO; 1usize << n];
    s[0] = Complex64::new(1.0, 0.0);
    Ok(s)
}

#[inline]
fn mask(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Applies a 2x2 matrix `[[a, b], [c, d]]` to qubit `q`.
fn apply_1q(state: &mut [Complex64], n: usize, q: usize, u: [Complex64; 4]) {
    let m = mask(n, q);
    for i in 0..state.len() {
        if i & m == 0 {
            let (x0, x1) = (state[i], state[i | m]);
            state[i] = u[0] * x0 + u[1] * x1;
            state[i | m] = u[2] * x0 + u[3] * x1;
        }
    }
}

/// Applies one gate. Measurements are not handled here.
pub(crate) fn apply_instruction(
    state: &mut [Complex64],
    n: usize,
    inst: &Instruction,
) -> Result<(), BackendError> {
    let qs = inst.qubits();
    if let Some(&q) = qs.iter().find(|&&q| q >= n) {
        return Err(BackendError::QubitOutOfRange { qubit: q, size: n });
    }
    match inst.gate() {
        Gate::I | Gate::Measure => {}
        Gate::X => {
            let m = mask(n, qs[0]);
            for i in 0..state.len() {
                if i & m == 0 {
                    state.swap(i, i | m);
                }
            }
        }
        Gate::CNOT => {
            let (c, t) = (mask(n, qs[0]), mask(n, qs[1]));
            for i in 0..state.len() {
                if i & c != 0 && i & t == 0 {
                    state.swap(i, i | t);
                }
            }
        }
        Gate::CZ => {
            let both = mask(n, qs[0]) | mask(n, qs[1]);
            for (i, a) in state.iter_mut().enumerate() {
                if i & both == both {
                    *a = -*a;
                }
            }
        }
        Gate::Swap => {
            let (a, b) = (mask(n, qs[0]), mask(n, qs[1]));
            for i in 0..state.len() {
                if i & a != 0 && i & b == 0 {
                    state.swap(i, (i & !a) | b);
                }
            }
        }
        _ => {
            let u = gate_matrix(inst)?;
            let d = u.data();
            apply_1q(state, n, qs[0], [d[0], d[1], d[2], d[3]]);
        }
    }
    Ok(())
}

/// Evolves `state` through the gates of `circuit`, skipping measurements.
pub(crate) fn evolve(
    state: &mut [Complex64],
    n: usize,
    circuit: &CompositeInstruction,
) -> Result<(), BackendError> {
    for inst in circuit.instructions() {
        if !inst.is_concrete() {
            return Err(BackendError::Symbolic(circuit.name().to_string()));
        }
        apply_instruction(state, n, inst)?;
    }
    Ok(())
}

/// Final state of a measurement-free circuit applied to `|0...0>`.
pub fn statevector(circuit: &CompositeInstruction, n: usize) -> Result<Vec<Complex64>, BackendError> {
    if circuit.has_measurements() {
        return Err(BackendError::MeasurementInStatevector(circuit.name().to_string()));
    }
    let mut s = zero_state(n)?;
    evolve(&mut s, n, circuit)?;
    Ok(s)
}

/// Qubits measured by `circuit`, in first-measurement order. Fails if a
/// gate touches a qubit after it has been measured.
pub(crate) fn terminal_measurements(circuit: &CompositeInstruction) -> Result<Vec<usize>, BackendError> {
    let mut measured: Vec<usize> = Vec::new();
    for inst in circuit.instructions() {
        if inst.gate() == Gate::Measure {
            if !measured.contains(&inst.qubits()[0]) {
                measured.push(inst.qubits()[0]);
            }
        } else if let Some(&q) = inst.qubits().iter().find(|q| measured.contains(q)) {
            return Err(BackendError::NonTerminalMeasurement {
                circuit: circuit.name().to_string(),
                qubit: q,
            });
        }
    }
    Ok(measured)
}

/// Outcome distribution over the measured qubits. Keys are full-register
/// bitstrings (qubit 0 first) with unmeasured positions reported as `0`.
pub(crate) fn marginal(state: &[Complex64], n: usize, measured: &[usize]) -> Vec<(usize, f64)> {
    let keep = measured.iter().fold(0usize, |acc, &q| acc | mask(n, q));
    let mut probs = std::collections::BTreeMap::new();
    for (i, a) in state.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            *probs.entry(i & keep).or_insert(0.0) += p;
        }
    }
    probs.into_iter().collect()
}

pub(crate) fn bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if index & mask(n, q) != 0 { '1' } else { '0' })
        .collect()
}
