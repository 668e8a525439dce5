//! Simulator, moments and excitation energies against dense nalgebra
//! references on random inputs.

mod common;

use std::sync::Arc;

use common::{c, dense, eigh, raw_moment, sector_eigenvalues, CMat};
use proptest::prelude::*;
use qcx::algorithms::{excitation_basis, moment_table, qeom_from_state};
use qcx::backend::{statevector, StatevectorAccelerator};
use qcx::ir::{Gate, Instruction, Parameter};
use qcx::pauli::{parse_hamiltonian, PauliOperator};
use qcx::{Accelerator, AcceleratorConfig, CompositeInstruction};

/// Textbook single-qubit matrices (qubit 0 most significant).
fn one_qubit(g: Gate, t: f64) -> CMat {
    let (o, i) = (c(0.0, 0.0), c(1.0, 0.0));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (cs, sn) = ((t / 2.0).cos(), (t / 2.0).sin());
    let m = |v: [num_complex::Complex64; 4]| CMat::from_row_slice(2, 2, &v);
    match g {
        Gate::X => m([o, i, i, o]),
        Gate::Y => m([o, c(0.0, -1.0), c(0.0, 1.0), o]),
        Gate::Z => m([i, o, o, -i]),
        Gate::H => m([c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        Gate::S => m([i, o, o, c(0.0, 1.0)]),
        Gate::T => m([i, o, o, c(h, h)]),
        Gate::Rx => m([c(cs, 0.0), c(0.0, -sn), c(0.0, -sn), c(cs, 0.0)]),
        Gate::Ry => m([c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)]),
        Gate::Rz => m([c(cs, -sn), o, o, c(cs, sn)]),
        _ => unreachable!(),
    }
}

fn embed(u: &CMat, q: usize, n: usize) -> CMat {
    let mut m = CMat::from_element(1, 1, c(1.0, 0.0));
    for k in 0..n {
        m = if k == q { m.kronecker(u) } else { m.kronecker(&CMat::identity(2, 2)) };
    }
    m
}

/// CNOT as a permutation of basis states.
fn cnot(ctrl: usize, tgt: usize, n: usize) -> CMat {
    let dim = 1 << n;
    let mut m = CMat::zeros(dim, dim);
    for k in 0..dim {
        let out = if (k >> (n - 1 - ctrl)) & 1 == 1 { k ^ (1 << (n - 1 - tgt)) } else { k };
        m[(out, k)] = c(1.0, 0.0);
    }
    m
}

fn gates() -> impl Strategy<Value = Vec<(u8, usize, usize, f64)>> {
    prop::collection::vec((0u8..10, 0usize..3, 0usize..3, -3.0f64..3.0), 0..25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statevector_matches_dense_unitaries(ops in gates()) {
        let n = 3;
        let table = [Gate::X, Gate::Y, Gate::Z, Gate::H, Gate::S, Gate::T, Gate::Rx, Gate::Ry, Gate::Rz];
        let mut circuit = CompositeInstruction::new("random");
        let mut u = CMat::identity(1 << n, 1 << n);
        for (g, a, b, t) in ops {
            if g as usize == table.len() {
                if a == b {
                    continue;
                }
                circuit.add_instruction(Instruction::new(Gate::CNOT, &[a, b], &[]).unwrap());
                u = cnot(a, b, n) * u;
            } else {
                let gate = table[g as usize];
                let params = if gate.num_params() == 1 { vec![Parameter::Concrete(t)] } else { vec![] };
                circuit.add_instruction(Instruction::new(gate, &[a], &params).unwrap());
                u = embed(&one_qubit(gate, t), a, n) * u;
            }
        }
        let psi = statevector(&circuit, n).unwrap();
        let want = u.column(0);
        for (x, y) in psi.iter().zip(want.iter()) {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn raw_moments_match_matrix_powers(coefs in prop::collection::vec(-1.0f64..1.0, 6), ops in gates()) {
        let strings = ["Z0", "Z1 Z2", "X0 X1", "Y1 Y2", "X0 Z1 X2", "Z2"];
        let mut h = PauliOperator::zero();
        for (s, k) in strings.iter().zip(&coefs) {
            h = &h + &PauliOperator::term(*k, s);
        }
        h = &h + &PauliOperator::term(1e-3, "Z0 Z1 Z2");
        let mut prep = CompositeInstruction::new("prep");
        for (g, a, _, t) in ops {
            let gate = if g % 2 == 0 { Gate::Ry } else { Gate::Rz };
            prep.add_instruction(Instruction::new(gate, &[a], &[Parameter::Concrete(t)]).unwrap());
        }
        let acc: Arc<dyn Accelerator> = Arc::new(StatevectorAccelerator::new(AcceleratorConfig::exact()).unwrap());
        let table = moment_table(&h, &prep, acc.as_ref(), 5).unwrap();
        let psi = statevector(&prep, 3).unwrap();
        let m = dense(&h, 3);
        for k in 1..=5u32 {
            let want = raw_moment(&m, &psi, k);
            prop_assert!((table.raw_moments[k as usize - 1] - want).abs() < 1e-9 * (1.0 + want.abs()));
        }
        // First two connected moments are the mean and the variance.
        let var = table.raw_moments[1] - table.raw_moments[0].powi(2);
        prop_assert!((table.connected_moments[1] - var).abs() < 1e-10);
    }
}

#[test]
fn qeom_gaps_on_a_second_hamiltonian() {
    let h = parse_hamiltonian(include_str!("../../../data/toy_2q.ham")).unwrap();
    let m = dense(&h, 2);
    let (_, vecs) = eigh(&m);
    // Lowest eigenvector in the one-electron sector (indices 1 and 2).
    let ground = vecs
        .iter()
        .find(|v| v[1].norm_sqr() + v[2].norm_sqr() > 0.5)
        .unwrap();
    let psi: Vec<_> = ground.iter().copied().collect();
    let basis: Vec<PauliOperator> = excitation_basis(1, 2).unwrap().into_iter().map(|b| b.1).collect();
    let r = qeom_from_state(&h, &basis, &psi, 2).unwrap();
    let sector = sector_eigenvalues(&h, 2, 1);
    assert_eq!(r.energies.len(), 1);
    assert!((r.energies[0] - (sector[1] - sector[0])).abs() < 1e-9, "{r:?} {sector:?}");
}

/// Eigenvalues of `m` restricted to the basis states selected by `keep`.
fn block_eigenvalues(m: &CMat, keep: impl Fn(usize) -> bool) -> Vec<f64> {
    let idx: Vec<usize> = (0..m.nrows()).filter(|&k| keep(k)).collect();
    eigh(&CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])).0
}

#[test]
fn four_qubit_closed_shell_excitations() {
    // Number- and spin-conserving model on 4 spin-orbitals (alpha 0, 1 and
    // beta 2, 3). From the exact ground state the excitation manifold spans
    // the whole one-alpha one-beta block, so QEOM is exact there.
    use qcx::fermion::{jordan_wigner, FermionOperator};
    let mut f = FermionOperator::zero();
    for (p, e) in [-1.0, -0.4, -0.9, -0.35].iter().enumerate() {
        f.add_term(vec![(p, true), (p, false)], *e);
    }
    f.add_term(vec![(0, true), (2, true), (2, false), (0, false)], 0.6);
    f.add_term(vec![(1, true), (3, true), (3, false), (1, false)], 0.5);
    for (a, b, g) in [(0, 1, 0.15), (2, 3, 0.12)] {
        f.add_term(vec![(a, true), (b, false)], g);
        f.add_term(vec![(b, true), (a, false)], g);
    }
    let h = jordan_wigner(&f, 4).unwrap();
    assert!(h.is_hermitian());
    let m = dense(&h, 4);
    // Basis index bits: qubit 0 is bit 3.
    let alpha = |k: usize| (k >> 2).count_ones();
    let beta = |k: usize| (k & 3).count_ones();
    let block = block_eigenvalues(&m, |k| alpha(k) == 1 && beta(k) == 1);
    assert!((block[0] - sector_eigenvalues(&h, 4, 2)[0]).abs() < 1e-12);

    let (vals, vecs) = eigh(&m);
    let g = (0..vals.len()).find(|&k| (vals[k] - block[0]).abs() < 1e-10).unwrap();
    let psi: Vec<_> = vecs[g].iter().copied().collect();
    let basis: Vec<PauliOperator> = excitation_basis(2, 4).unwrap().into_iter().map(|b| b.1).collect();
    let r = qeom_from_state(&h, &basis, &psi, 4).unwrap();
    let gaps: Vec<f64> = block[1..].iter().map(|e| e - block[0]).collect();
    assert_eq!(r.energies.len(), gaps.len(), "{r:?} {gaps:?}");
    for (e, want) in r.energies.iter().zip(&gaps) {
        assert!((e - want).abs() < 1e-8, "{r:?} {gaps:?}");
    }
}
