//! Randomized invariants checked against the nalgebra oracle.

mod common;

use common::{c, dense, to_nalgebra, CMat};
use num_complex::Complex64;
use proptest::prelude::*;
use qcx::fermion::{jordan_wigner, FermionOperator};
use qcx::pauli::{Pauli, PauliOperator, PauliString};

const TOL: f64 = 1e-10;

fn letter(k: u8) -> Option<Pauli> {
    [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)][k as usize]
}

/// Random operator on exactly `n` qubits (an identity-free term on the top
/// qubit pins the register size for the dense comparison).
fn operator(n: usize) -> impl Strategy<Value = PauliOperator> {
    prop::collection::vec((prop::collection::vec(0u8..4, n), -2.0f64..2.0, -2.0f64..2.0), 1..5).prop_map(
        move |terms| {
            let mut op = PauliOperator::zero();
            for (letters, re, im) in terms {
                let ops = letters.iter().enumerate().filter_map(|(q, &k)| letter(k).map(|p| (q, p)));
                let (phase, s) = PauliString::from_ops(ops);
                op.add_term(s, phase * c(re, im));
            }
            op
        },
    )
}

fn close(a: &CMat, b: &CMat) -> bool {
    (a - b).iter().all(|z| z.norm() < TOL)
}

fn qcx_dense(op: &PauliOperator, n: usize) -> CMat {
    to_nalgebra(&op.to_matrix(n).unwrap())
}

fn algebra_case(n: usize) -> impl Strategy<Value = (usize, PauliOperator, PauliOperator)> {
    (operator(n), operator(n)).prop_map(move |(a, b)| (n, a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(350))]

    #[test]
    fn to_matrix_is_a_homomorphism((n, a, b) in (1usize..=3).prop_flat_map(algebra_case)) {
        let (ma, mb) = (dense(&a, n), dense(&b, n));
        prop_assert!(close(&qcx_dense(&a, n), &ma));
        prop_assert!(close(&qcx_dense(&(&a + &b), n), &(&ma + &mb)));
        prop_assert!(close(&qcx_dense(&(&a * &b), n), &(&ma * &mb)));
        prop_assert!(close(&qcx_dense(&a.commutator(&b), n), &(&ma * &mb - &mb * &ma)));
        prop_assert!(close(&qcx_dense(&a.adjoint(), n), &ma.adjoint()));
    }

    #[test]
    fn apply_matches_dense_product(n in 1usize..=3, seed in prop::collection::vec(-1.0f64..1.0, 16)) {
        let op = PauliOperator::term(0.3, "X0") + PauliOperator::term(c(0.0, 0.7), "Y0");
        let dim = 1 << n;
        let psi: Vec<Complex64> = (0..dim).map(|k| c(seed[2 * k], seed[2 * k + 1])).collect();
        let got = op.apply(&psi, n).unwrap();
        let want = dense(&op, n) * nalgebra::DVector::from_column_slice(&psi);
        for (g, w) in got.iter().zip(want.iter()) {
            prop_assert!((g - w).norm() < TOL);
        }
    }

    #[test]
    fn hermitian_operators_have_real_spectra(a in operator(2)) {
        let h = &a + &a.adjoint();
        prop_assert!(h.is_hermitian());
        let m = qcx_dense(&h, 2);
        prop_assert!(close(&m, &m.adjoint()));
        let ours = qcx::linalg::hermitian_eig(&h.to_matrix(2).unwrap()).unwrap();
        let (oracle, _) = common::eigh(&m);
        for (x, y) in ours.values.iter().zip(&oracle) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

fn ladder(p: usize, dagger: bool, n: usize) -> CMat {
    dense(&jordan_wigner(&FermionOperator::from_term(vec![(p, dagger)], 1.0), n).unwrap(), n)
}

#[test]
fn jordan_wigner_canonical_anticommutation() {
    for n in 1..=4 {
        let id = CMat::identity(1 << n, 1 << n);
        let zero = CMat::zeros(1 << n, 1 << n);
        for p in 0..n {
            for q in 0..n {
                let (ap, aq) = (ladder(p, false, n), ladder(q, false, n));
                let (cp, cq) = (ladder(p, true, n), ladder(q, true, n));
                let delta = if p == q { id.clone() } else { zero.clone() };
                assert!(close(&(&ap * &cq + &cq * &ap), &delta), "{{a_{p}, a+_{q}}} on {n}");
                assert!(close(&(&ap * &aq + &aq * &ap), &zero), "{{a_{p}, a_{q}}} on {n}");
                assert!(close(&(&cp * &cq + &cq * &cp), &zero), "{{a+_{p}, a+_{q}}} on {n}");
                assert!(close(&cp, &ap.adjoint()));
            }
        }
    }
}

#[test]
fn number_operator_counts_occupation() {
    // Mode p is qubit p; basis index bit for qubit p is (n - 1 - p).
    let n = 3;
    for p in 0..n {
        let m = dense(&jordan_wigner(&FermionOperator::number(p), n).unwrap(), n);
        for k in 0..1usize << n {
            let occ = ((k >> (n - 1 - p)) & 1) as f64;
            assert!((m[(k, k)] - c(occ, 0.0)).norm() < TOL);
        }
    }
}
