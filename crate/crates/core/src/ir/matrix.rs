use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Gate, Instruction, IrError};
use crate::linalg::DenseMatrix;

fn m2(a: [Complex64; 4]) -> DenseMatrix {
    DenseMatrix::from_vec(2, 2, a.to_vec()).expect("2x2")
}

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Unitary of a concrete, non-measurement instruction. Two-qubit matrices
/// use the instruction's first qubit as the leftmost (high) factor.
pub fn gate_matrix(inst: &Instruction) -> Result<DenseMatrix, IrError> {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let angle = || -> Result<f64, IrError> {
        inst.angle()
            .ok_or_else(|| IrError::Symbolic(inst.to_string()))
    };
    let r = FRAC_1_SQRT_2;
    Ok(match inst.gate() {
        Gate::I => DenseMatrix::identity(2),
        Gate::X => m2([o, l, l, o]),
        Gate::Y => m2([o, c(0.0, -1.0), c(0.0, 1.0), o]),
        Gate::Z => m2([l, o, o, c(-1.0, 0.0)]),
        Gate::H => m2([c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]),
        Gate::S => m2([l, o, o, c(0.0, 1.0)]),
        Gate::Sdg => m2([l, o, o, c(0.0, -1.0)]),
        Gate::T => m2([l, o, o, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]),
        Gate::Rx => {
            let t = angle()? / 2.0;
            let (s, co) = t.sin_cos();
            m2([c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
        }
        Gate::Ry => {
            let t = angle()? / 2.0;
            let (s, co) = t.sin_cos();
            m2([c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
        }
        Gate::Rz => {
            let t = angle()? / 2.0;
            m2([Complex64::from_polar(1.0, -t), o, o, Complex64::from_polar(1.0, t)])
        }
        Gate::CNOT => {
            let mut m = DenseMatrix::zeros(4, 4);
            m[(0, 0)] = l;
            m[(1, 1)] = l;
            m[(2, 3)] = l;
            m[(3, 2)] = l;
            m
        }
        Gate::CZ => DenseMatrix::from_diagonal(&[1.0, 1.0, 1.0, -1.0]),
        Gate::Swap => {
            let mut m = DenseMatrix::zeros(4, 4);
            m[(0, 0)] = l;
            m[(1, 2)] = l;
            m[(2, 1)] = l;
            m[(3, 3)] = l;
            m
        }
        Gate::Measure => return Err(IrError::NoMatrix(Gate::Measure)),
    })
}
