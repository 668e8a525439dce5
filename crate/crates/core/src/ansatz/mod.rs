//! Circuit generators: Hartree-Fock preparation, exponentials of Pauli
//! sums, first-order Trotterized UCCSD and ADAPT operator pools.
//!
//! Spin-orbital layout: with `nq` qubits and `m = nq / 2` spatial orbitals,
//! qubits `0..m` hold alpha spin-orbitals and `m..nq` beta spin-orbitals.

mod pool;

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::fermion::{anti_hermitian_excitation, FermionError, JordanWigner};
use crate::ir::{CompositeInstruction, Gate, Instruction, Parameter};
use crate::pauli::{Pauli, PauliOperator, HERMITIAN_TOL};
use crate::registry::{HeterogeneousMap, MapError};

pub use pool::{build_pool, NamedPool, OperatorPool, PoolElement, PoolGenerator, POOL_NAMES};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnsatzError {
    #[error("invalid electron/qubit specification: {0}")]
    InvalidSpec(String),
    #[error("generator term {term} has a real coefficient part {re:e}; expected an anti-Hermitian sum")]
    NotAntiHermitian { term: String, re: f64 },
    #[error("unknown operator pool `{name}`; supported pools: {}", available.join(", "))]
    UnknownPool { name: String, available: Vec<String> },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Fermion(#[from] FermionError),
    #[error(transparent)]
    Options(#[from] MapError),
}

/// Electron and spin-orbital counts for closed-shell generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UccsdSpec {
    pub ne: usize,
    pub nq: usize,
}

impl UccsdSpec {
    pub fn new(ne: usize, nq: usize) -> Result<Self, AnsatzError> {
        let spec = UccsdSpec { ne, nq };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), AnsatzError> {
        let UccsdSpec { ne, nq } = *self;
        if nq == 0 || nq % 2 != 0 {
            return Err(AnsatzError::InvalidSpec(format!(
                "nq must be a positive even number, got {nq}"
            )));
        }
        if ne == 0 || ne > nq {
            return Err(AnsatzError::InvalidSpec(format!(
                "ne must satisfy 0 < ne <= nq, got ne = {ne}, nq = {nq}"
            )));
        }
        if ne % 2 != 0 {
            return Err(AnsatzError::InvalidSpec(format!(
                "closed-shell generators need an even electron count, got {ne}"
            )));
        }
        Ok(())
    }

    pub fn n_spatial(&self) -> usize {
        self.nq / 2
    }

    pub fn n_occupied_spatial(&self) -> usize {
        self.ne / 2
    }
}

/// Occupied spin-orbitals of the reference determinant.
///
/// With even `ne` and `nq` this is the closed-shell alpha/beta layout; for
/// any other combination the first `ne` qubits are occupied.
pub fn reference_occupation(ne: usize, nq: usize) -> Result<Vec<usize>, AnsatzError> {
    if ne > nq || nq == 0 {
        return Err(AnsatzError::InvalidSpec(format!(
            "cannot place {ne} electrons in {nq} spin-orbitals"
        )));
    }
    if ne % 2 == 0 && nq % 2 == 0 {
        let (m, h) = (nq / 2, ne / 2);
        Ok((0..h).chain(m..m + h).collect())
    } else {
        Ok((0..ne).collect())
    }
}

/// X gates on the occupied qubits of [`reference_occupation`].
pub fn reference_state_circuit(ne: usize, nq: usize) -> Result<CompositeInstruction, AnsatzError> {
    let mut c = CompositeInstruction::new("reference");
    for q in reference_occupation(ne, nq)? {
        c.add_instruction(Instruction::one(Gate::X, q));
    }
    Ok(c)
}

/// Closed-shell Hartree-Fock determinant: X on alpha qubits `0..ne/2` and
/// beta qubits `nq/2..nq/2+ne/2`.
pub fn hartree_fock_circuit(ne: usize, nq: usize) -> Result<CompositeInstruction, AnsatzError> {
    UccsdSpec::new(ne, nq)?;
    let mut c = reference_state_circuit(ne, nq)?;
    c.set_name("hf");
    Ok(c)
}

/// First-order product circuit for `exp(angle * G)`, `G = sum_k i c_k P_k`.
///
/// Each term in canonical order becomes: basis change into Z (H for X, Sdg
/// then H for Y), a CNOT ladder accumulating parity onto the highest support
/// qubit, `Rz(-2 c_k angle)`, then the ladder and basis change undone. The
/// identity component only contributes a global phase and is skipped.
pub fn exp_pauli(generator: &PauliOperator, angle: Parameter) -> Result<CompositeInstruction, AnsatzError> {
    let mut c = CompositeInstruction::new("exp_pauli");
    append_exp_pauli(&mut c, generator, &angle)?;
    Ok(c)
}

pub(crate) fn check_anti_hermitian(generator: &PauliOperator) -> Result<(), AnsatzError> {
    for (s, coef) in generator.iter() {
        if coef.re.abs() > HERMITIAN_TOL {
            return Err(AnsatzError::NotAntiHermitian {
                term: s.to_string(),
                re: coef.re,
            });
        }
    }
    Ok(())
}

/// Appends the [`exp_pauli`] gate sequence to an existing circuit.
pub fn append_exp_pauli(
    circuit: &mut CompositeInstruction,
    generator: &PauliOperator,
    angle: &Parameter,
) -> Result<(), AnsatzError> {
    check_anti_hermitian(generator)?;
    for (s, coef) in generator.iter() {
        if s.is_identity() {
            continue;
        }
        let ops = s.ops();
        for &(q, p) in ops {
            match p {
                Pauli::X => circuit.add_instruction(Instruction::one(Gate::H, q)),
                Pauli::Y => {
                    circuit.add_instruction(Instruction::one(Gate::Sdg, q));
                    circuit.add_instruction(Instruction::one(Gate::H, q));
                }
                Pauli::Z => {}
            }
        }
        for w in ops.windows(2) {
            circuit.add_instruction(Instruction::two(Gate::CNOT, w[0].0, w[1].0));
        }
        let target = ops[ops.len() - 1].0;
        circuit.add_instruction(Instruction::rotation(Gate::Rz, target, angle.times(-2.0 * coef.im)));
        for w in ops.windows(2).rev() {
            circuit.add_instruction(Instruction::two(Gate::CNOT, w[0].0, w[1].0));
        }
        for &(q, p) in ops {
            match p {
                Pauli::X => circuit.add_instruction(Instruction::one(Gate::H, q)),
                Pauli::Y => {
                    circuit.add_instruction(Instruction::one(Gate::H, q));
                    circuit.add_instruction(Instruction::one(Gate::S, q));
                }
                Pauli::Z => {}
            }
        }
    }
    Ok(())
}

/// `n choose k` in 128-bit arithmetic.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of double excitations in the UCCSD benchmark counting,
/// `C(nq/2, ne)^2`. Defined for `ne < nq/2`.
pub fn count_double_excitations(nq: usize, ne: usize) -> Result<u128, AnsatzError> {
    if ne >= nq / 2 {
        return Err(AnsatzError::Precondition(format!(
            "double-excitation counts are reported for ne < nq/2, got ne = {ne}, nq = {nq}"
        )));
    }
    let c = binomial(nq / 2, ne);
    Ok(c * c)
}

/// Number of spin-shared single amplitudes: occupied times virtual spatial
/// orbitals.
pub fn count_single_excitations(spec: UccsdSpec) -> usize {
    let occ = spec.n_occupied_spatial();
    occ * (spec.n_spatial() - occ)
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Rightmost position that can still be advanced.
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Structural summary of a generated UCCSD circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UccsdCounts {
    pub singles: usize,
    pub doubles: usize,
    pub variables: usize,
    pub gates: usize,
}

/// First-order Trotterized UCCSD on top of the Hartree-Fock state.
///
/// Singles: one amplitude per (occupied, virtual) spatial pair, shared by the
/// alpha and beta excitations. Doubles: one amplitude per ordered pair
/// `(A, B)` of `ne`-element subsets of the `nq/2` spatial orbitals, which is
/// the `C(nq/2, ne)^2` counting; pair `(A, B)` is the opposite-spin double
/// moving an alpha electron `min A -> max A` and a beta electron
/// `min B -> max B`. Variables are `t0, t1, ...`, singles first.
pub fn uccsd_circuit(spec: UccsdSpec) -> Result<CompositeInstruction, AnsatzError> {
    uccsd_with_counts(spec).map(|(c, _)| c)
}

/// [`uccsd_circuit`] plus its excitation and gate counts.
pub fn uccsd_with_counts(spec: UccsdSpec) -> Result<(CompositeInstruction, UccsdCounts), AnsatzError> {
    spec.validate()?;
    let (ne, nq) = (spec.ne, spec.nq);
    let m = spec.n_spatial();
    let h = spec.n_occupied_spatial();
    let jw = JordanWigner::new(nq);

    let mut circuit = hartree_fock_circuit(ne, nq)?;
    circuit.set_name("uccsd");
    let mut n_var = 0usize;
    let mut next_var = |c: &mut CompositeInstruction| -> Arc<str> {
        let v = c.add_variable(&format!("t{n_var}"));
        n_var += 1;
        v
    };

    let mut singles = 0;
    for i in 0..h {
        for a in h..m {
            let alpha = anti_hermitian_excitation(&[i], &[a], "")?;
            let beta = anti_hermitian_excitation(&[i + m], &[a + m], "")?;
            let g = &jw.transform(&alpha.generator)? + &jw.transform(&beta.generator)?;
            let var = next_var(&mut circuit);
            append_exp_pauli(&mut circuit, &g, &Parameter::scaled(1.0, var))?;
            singles += 1;
        }
    }

    let subsets = combinations(m, ne);
    // Many subset pairs share the same endpoints and hence the same generator.
    let mut generators: HashMap<(usize, usize, usize, usize), PauliOperator> = HashMap::new();
    let mut doubles = 0;
    for a in &subsets {
        for b in &subsets {
            let (ai, aa) = (a[0], a[a.len() - 1]);
            let (bi, ba) = (b[0] + m, b[b.len() - 1] + m);
            let var = next_var(&mut circuit);
            if ai != aa {
                let key = (ai, aa, bi, ba);
                if !generators.contains_key(&key) {
                    let e = anti_hermitian_excitation(&[ai, bi], &[aa, ba], "")?;
                    generators.insert(key, jw.transform(&e.generator)?);
                }
                append_exp_pauli(&mut circuit, &generators[&key], &Parameter::scaled(1.0, var))?;
            }
            doubles += 1;
        }
    }

    let counts = UccsdCounts {
        singles,
        doubles,
        variables: circuit.n_variables(),
        gates: circuit.n_instructions(),
    };
    Ok((circuit, counts))
}

/// Registry-facing circuit generator.
pub trait CircuitGenerator: Send + Sync {
    fn name(&self) -> &str;
    /// Builds a circuit from generator-specific options.
    fn generate(&self, options: &HeterogeneousMap) -> Result<CompositeInstruction, AnsatzError>;
}

fn spec_from(options: &HeterogeneousMap) -> Result<(usize, usize), AnsatzError> {
    let ne = options.get::<i64>("ne")?;
    let nq = options.get::<i64>("nq")?;
    if ne < 0 || nq < 0 {
        return Err(AnsatzError::InvalidSpec(format!("negative count ne = {ne}, nq = {nq}")));
    }
    Ok((ne as usize, nq as usize))
}

/// `hf` generator; options `ne`, `nq`.
pub struct HartreeFockGenerator;

impl CircuitGenerator for HartreeFockGenerator {
    fn name(&self) -> &str {
        "hf"
    }
    fn generate(&self, options: &HeterogeneousMap) -> Result<CompositeInstruction, AnsatzError> {
        let (ne, nq) = spec_from(options)?;
        hartree_fock_circuit(ne, nq)
    }
}

/// `uccsd` generator; options `ne`, `nq`.
pub struct UccsdGenerator;

impl CircuitGenerator for UccsdGenerator {
    fn name(&self) -> &str {
        "uccsd"
    }
    fn generate(&self, options: &HeterogeneousMap) -> Result<CompositeInstruction, AnsatzError> {
        let (ne, nq) = spec_from(options)?;
        uccsd_circuit(UccsdSpec::new(ne, nq)?)
    }
}

/// `exp_pauli` generator; options `generator` (observable) and `variable`
/// (string, default `t0`).
pub struct ExpPauliGenerator;

impl CircuitGenerator for ExpPauliGenerator {
    fn name(&self) -> &str {
        "exp_pauli"
    }
    fn generate(&self, options: &HeterogeneousMap) -> Result<CompositeInstruction, AnsatzError> {
        let g = options.get::<Arc<PauliOperator>>("generator")?;
        let var = options.get_or::<String>("variable", "t0".to_string())?;
        exp_pauli(&g, Parameter::var(&var))
    }
}

/// Imaginary unit, handy for writing generators `i c P`.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hf_layouts() {
        let c = hartree_fock_circuit(4, 8).unwrap();
        let qs: Vec<usize> = c.instructions().map(|i| i.qubits()[0]).collect();
        assert_eq!(qs, vec![0, 1, 4, 5]);
        assert_eq!(c.count_gates().get("X"), Some(&4));
        let c = hartree_fock_circuit(2, 4).unwrap();
        let qs: Vec<usize> = c.instructions().map(|i| i.qubits()[0]).collect();
        assert_eq!(qs, vec![0, 2]);
        assert!(hartree_fock_circuit(0, 4).is_err());
        assert!(hartree_fock_circuit(3, 4).is_err());
        assert!(hartree_fock_circuit(2, 5).is_err());
    }

    #[test]
    fn exp_pauli_single_z() {
        let g = PauliOperator::term(I, "Z0");
        let c = exp_pauli(&g, Parameter::var("theta")).unwrap();
        assert_eq!(c.n_instructions(), 1);
        let inst = c.instructions().next().unwrap();
        assert_eq!(inst.gate(), Gate::Rz);
        assert_eq!(inst.parameter().unwrap().to_string(), "-2*theta");
    }

    #[test]
    fn exp_pauli_xx_structure() {
        let g = PauliOperator::term(I, "X0 X1");
        let c = exp_pauli(&g, Parameter::var("t")).unwrap();
        let seq: Vec<String> = c.instructions().map(|i| i.to_string()).collect();
        assert_eq!(
            seq,
            vec!["H q[0]", "H q[1]", "CNOT q[0], q[1]", "Rz q[1], -2*t", "CNOT q[0], q[1]", "H q[0]", "H q[1]"]
        );
    }

    #[test]
    fn exp_pauli_rejects_hermitian() {
        assert!(matches!(
            exp_pauli(&PauliOperator::term(1.0, "X0"), Parameter::var("t")),
            Err(AnsatzError::NotAntiHermitian { .. })
        ));
        assert!(exp_pauli(&PauliOperator::zero(), Parameter::var("t")).unwrap().is_empty());
    }

    #[test]
    fn double_counts() {
        assert_eq!(count_double_excitations(8, 2).unwrap(), 36);
        assert_eq!(count_double_excitations(4, 1).unwrap(), 4);
        assert_eq!(count_double_excitations(20, 2).unwrap(), 2025);
        assert!(count_double_excitations(8, 4).is_err());
        for (nq, ne) in [(8, 1), (12, 2), (20, 3)] {
            let m = nq / 2;
            assert_eq!(
                count_double_excitations(nq, ne).unwrap(),
                binomial(m, m - ne).pow(2)
            );
        }
    }

    #[test]
    fn combinations_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn uccsd_small() {
        let (c, counts) = uccsd_with_counts(UccsdSpec::new(2, 4).unwrap()).unwrap();
        assert_eq!(counts.singles, 1);
        assert_eq!(counts.doubles, 1);
        assert_eq!(c.n_variables(), 2);
        let first: Vec<String> = c.instructions().take(2).map(|i| i.to_string()).collect();
        assert_eq!(first, vec!["X q[0]", "X q[2]"]);
    }
}
