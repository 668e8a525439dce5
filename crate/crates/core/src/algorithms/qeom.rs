//! Quantum equation of motion for excitation energies.

use std::sync::Arc;

use num_complex::Complex64;

use super::estimator::{Estimator, Prepared};
use super::{accelerator, concrete_ansatz, count_option, hermitian_observable, invalid, real_option, Algorithm, AlgorithmError};
use crate::ansatz::reference_occupation;
use crate::backend::{Accelerator, AcceleratorBuffer};
use crate::fermion::{FermionOperator, JordanWigner};
use crate::ir::CompositeInstruction;
use crate::linalg::{generalized_eig_full, DenseMatrix, LinalgError};
use crate::pauli::PauliOperator;
use crate::registry::HeterogeneousMap;

const DEFAULT_THRESHOLD: f64 = 1e-10;

/// Particle-conserving excitation operators `O` for `ne` electrons in `nq`
/// spin-orbitals, paired with labels: every single `a†_a a_i` and double
/// `a†_a a†_b a_j a_i` from the reference determinant's occupied orbitals
/// to its virtual ones, followed by their adjoints (labelled with a `†`).
///
/// In the closed-shell layout (even `ne` and `nq`) only excitations that
/// conserve the number of alpha electrons are kept.
pub fn excitation_basis(ne: usize, nq: usize) -> Result<Vec<(String, PauliOperator)>, AlgorithmError> {
    let occ = reference_occupation(ne, nq)?;
    let virt: Vec<usize> = (0..nq).filter(|q| !occ.contains(q)).collect();
    let half = (ne % 2 == 0 && nq % 2 == 0).then_some(nq / 2);
    let alpha = |qs: &[usize]| half.map(|h| qs.iter().filter(|&&q| q < h).count());
    let jw = JordanWigner::new(nq);
    let mut out = Vec::new();
    let mut push = |label: String, ops: Vec<(usize, bool)>| -> Result<(), AlgorithmError> {
        let t = jw.transform(&FermionOperator::from_term(ops, 1.0))?;
        if !t.is_empty() {
            out.push((label, t));
        }
        Ok(())
    };
    for &i in &occ {
        for &a in &virt {
            if alpha(&[i]) == alpha(&[a]) {
                push(format!("{i}->{a}"), vec![(a, true), (i, false)])?;
            }
        }
    }
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y + 1..] {
                    if alpha(&[i, j]) == alpha(&[a, b]) {
                        push(format!("{i},{j}->{a},{b}"), vec![(a, true), (b, true), (j, false), (i, false)])?;
                    }
                }
            }
        }
    }
    let adjoints: Vec<(String, PauliOperator)> = out.iter().map(|(l, o)| (format!("{l}†"), o.adjoint())).collect();
    out.extend(adjoints);
    Ok(out)
}

/// Excitation energies and the retained rank of the double-commutator
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QeomResult {
    /// Positive excitation energies, ascending.
    pub energies: Vec<f64>,
    pub rank: usize,
}

/// Solves the pencil built from `M_uv = <[O_u†, [H, O_v]]>` and
/// `V_uv = <[O_u†, O_v]>`.
///
/// `V` is indefinite (excitations and de-excitations carry opposite signs)
/// while `M` is positive semidefinite at a ground state, so the problem is
/// solved as `V x = lambda M x` with canonical orthogonalization on `M`;
/// excitation energies are `1 / lambda` for `lambda > threshold`.
fn solve(
    expect: &mut dyn FnMut(&PauliOperator) -> Result<Complex64, AlgorithmError>,
    h: &PauliOperator,
    basis: &[PauliOperator],
    threshold: f64,
) -> Result<QeomResult, AlgorithmError> {
    if basis.is_empty() {
        return Err(AlgorithmError::EmptyBasis);
    }
    let k = basis.len();
    let mut m = DenseMatrix::zeros(k, k);
    let mut v = DenseMatrix::zeros(k, k);
    let h_comm: Vec<PauliOperator> = basis.iter().map(|o| h.commutator(o)).collect();
    let adj: Vec<PauliOperator> = basis.iter().map(PauliOperator::adjoint).collect();
    for u in 0..k {
        for w in 0..k {
            m[(u, w)] = expect(&adj[u].commutator(&h_comm[w]))?;
            v[(u, w)] = expect(&adj[u].commutator(&basis[w]))?;
        }
    }
    let sym = |a: &DenseMatrix| DenseMatrix::from_fn(k, k, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let (m, v) = (sym(&m), sym(&v));
    let pencil = match generalized_eig_full(&v, &m, threshold) {
        Ok(p) => p,
        Err(LinalgError::NegativeOverlap { .. }) => {
            return Err(invalid(
                "ansatz",
                "double-commutator matrix is not positive semidefinite; the state is not close to a ground state",
            ))
        }
        Err(e) => return Err(e.into()),
    };
    if pencil.rank == 0 {
        return Err(AlgorithmError::SingularOverlap);
    }
    let mut energies: Vec<f64> = pencil.values.iter().filter(|&&l| l > threshold).map(|l| 1.0 / l).collect();
    energies.sort_by(f64::total_cmp);
    Ok(QeomResult {
        energies,
        rank: pencil.rank,
    })
}

/// QEOM on an explicit `n`-qubit state with a caller-chosen operator basis.
pub fn qeom_from_state(
    h: &PauliOperator,
    basis: &[PauliOperator],
    state: &[Complex64],
    n: usize,
) -> Result<QeomResult, AlgorithmError> {
    solve(&mut |op| Ok(op.expectation(state, n)?), h, basis, DEFAULT_THRESHOLD)
}

struct Config {
    observable: Arc<PauliOperator>,
    accelerator: Arc<dyn Accelerator>,
    ansatz: CompositeInstruction,
    n_electrons: usize,
    threshold: f64,
}

/// Options: `ansatz` (the ground-state circuit; bound with
/// `ansatz-parameters` if symbolic), `accelerator`, `observable`,
/// `n-electrons`, optional `threshold` (default 1e-10).
///
/// Writes `excitation-energies`, `qeom-matrix-rank` and `opt-val` (the
/// energy of the prepared state).
#[derive(Default)]
pub struct Qeom {
    config: Option<Config>,
}

impl Algorithm for Qeom {
    fn name(&self) -> &str {
        "qeom"
    }

    fn initialize(&mut self, options: HeterogeneousMap) -> Result<(), AlgorithmError> {
        let threshold = real_option(&options, "threshold")?.unwrap_or(DEFAULT_THRESHOLD);
        if !(threshold > 0.0) {
            return Err(invalid("threshold", "must be positive"));
        }
        let observable = hermitian_observable(&options)?;
        let n_electrons = count_option(&options, "n-electrons")?.ok_or_else(|| invalid("n-electrons", "required"))?;
        if n_electrons > observable.n_qubits() {
            return Err(invalid(
                "n-electrons",
                format!("{n_electrons} electrons do not fit in {} qubits", observable.n_qubits()),
            ));
        }
        self.config = Some(Config {
            observable,
            accelerator: accelerator(&options)?,
            ansatz: concrete_ansatz(&options)?,
            n_electrons,
            threshold,
        });
        Ok(())
    }

    fn execute(&self, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
        let c = self.config.as_ref().ok_or(AlgorithmError::NotInitialized("qeom"))?;
        let n = super::register_size(buffer, &c.observable, &c.ansatz)?;
        let basis: Vec<PauliOperator> = excitation_basis(c.n_electrons, c.observable.n_qubits())?
            .into_iter()
            .map(|(_, o)| o)
            .collect();
        let est = Estimator::new(c.accelerator.as_ref(), n);
        let state: Prepared = est.prepare(&c.ansatz)?;
        let ground = est.expect(&state, &c.observable)?.re;
        let result = solve(&mut |op| est.expect(&state, op), &c.observable, &basis, c.threshold)?;
        buffer.set("opt-val", ground);
        buffer.set("excitation-energies", result.energies);
        buffer.set("qeom-matrix-rank", result.rank as i64);
        Ok(())
    }
}
