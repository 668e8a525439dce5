//! Independent dense oracles built on nalgebra. Qubit 0 is the most
//! significant bit, i.e. the leftmost Kronecker factor.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qcx::pauli::{Pauli, PauliOperator};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(p: Option<Pauli>) -> CMat {
    let (o, i) = (c(0.0, 0.0), c(1.0, 0.0));
    match p {
        None => CMat::from_row_slice(2, 2, &[i, o, o, i]),
        Some(Pauli::X) => CMat::from_row_slice(2, 2, &[o, i, i, o]),
        Some(Pauli::Y) => CMat::from_row_slice(2, 2, &[o, c(0.0, -1.0), c(0.0, 1.0), o]),
        Some(Pauli::Z) => CMat::from_row_slice(2, 2, &[i, o, o, -i]),
    }
}

/// Dense matrix of `op` on `n` qubits, by explicit Kronecker products.
pub fn dense(op: &PauliOperator, n: usize) -> CMat {
    let dim = 1usize << n;
    let mut out = CMat::zeros(dim, dim);
    for (s, coef) in op.iter() {
        let mut m = CMat::from_element(1, 1, c(1.0, 0.0));
        for q in 0..n {
            m = m.kronecker(&pauli_matrix(s.letter(q)));
        }
        out += m * *coef;
    }
    out
}

pub fn to_nalgebra(m: &qcx::linalg::DenseMatrix) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Ascending eigenvalues and matching eigenvectors of a Hermitian matrix.
pub fn eigh(m: &CMat) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let e = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let values = idx.iter().map(|&k| e.eigenvalues[k]).collect();
    let vectors = idx.iter().map(|&k| e.eigenvectors.column(k).into_owned()).collect();
    (values, vectors)
}

pub fn ground_energy(op: &PauliOperator) -> f64 {
    eigh(&dense(op, op.n_qubits())).0[0]
}

/// Eigenvalues of `op` restricted to basis states with `ne` set bits.
pub fn sector_eigenvalues(op: &PauliOperator, n: usize, ne: u32) -> Vec<f64> {
    let m = dense(op, n);
    let idx: Vec<usize> = (0..1usize << n).filter(|k| k.count_ones() == ne).collect();
    let sub = CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
    eigh(&sub).0
}

/// `<psi| e^{-beta H} H e^{-beta H} |psi> / <psi| e^{-2 beta H} |psi>`.
pub fn imaginary_time_energy(h: &CMat, psi0: &[Complex64], beta: f64) -> f64 {
    let (vals, vecs) = eigh(h);
    let psi = DVector::from_column_slice(psi0);
    let mut out = DVector::<Complex64>::zeros(psi0.len());
    for (e, v) in vals.iter().zip(&vecs) {
        out += v * (v.dotc(&psi) * (-beta * e).exp());
    }
    let norm = out.dotc(&out).re;
    (out.dotc(&(h * &out))).re / norm
}

/// `<psi|H^k|psi>` by repeated dense products.
pub fn raw_moment(h: &CMat, psi0: &[Complex64], k: u32) -> f64 {
    let psi = DVector::from_column_slice(psi0);
    let mut v = psi.clone();
    for _ in 0..k {
        v = h * v;
    }
    psi.dotc(&v).re
}

pub fn h2() -> PauliOperator {
    qcx::pauli::parse_hamiltonian(include_str!("../../../../data/h2_2q.ham")).unwrap()
}

pub const H2_GROUND: f64 = -1.144_960_27;

/// `(file name, source)` pairs from `tests/corpus/<kind>`, sorted by name.
pub fn corpus(kind: &str) -> Vec<(String, String)> {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(kind);
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "qpu"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect()
}

/// Expected `(line, column)` of the first error in each malformed source.
pub const MALFORMED_POSITIONS: [(&str, usize, usize); 10] = [
    ("01_missing_semicolon.qpu", 3, 1),
    ("02_unknown_gate.qpu", 2, 3),
    ("03_undeclared_variable.qpu", 2, 12),
    ("04_wrong_register.qpu", 2, 5),
    ("05_unclosed_body.qpu", 3, 1),
    ("06_duplicate_variable.qpu", 1, 41),
    ("07_wrong_arity.qpu", 2, 3),
    ("08_bad_character.qpu", 2, 11),
    ("09_line_form_extra_operand.qpu", 2, 8),
    ("10_bad_header.qpu", 1, 1),
];
