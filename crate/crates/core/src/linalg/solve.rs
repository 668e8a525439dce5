//! Linear solves.

use num_complex::Complex64;

use super::{DenseMatrix, LinalgError};

/// Minimizes `|A x - b|^2 + ridge |x|^2` through the normal equations
/// `(A†A + ridge I) x = A† b`.
pub fn solve_regularized_lsq(
    a: &DenseMatrix,
    b: &[Complex64],
    ridge: f64,
) -> Result<Vec<Complex64>, LinalgError> {
    if a.rows() != b.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix has {} rows but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    if !(ridge >= 0.0) {
        return Err(LinalgError::DimensionMismatch(format!(
            "ridge must be non-negative, got {ridge}"
        )));
    }
    let ah = a.adjoint();
    let mut normal = ah.matmul(a)?;
    for i in 0..normal.rows() {
        normal[(i, i)] += ridge;
    }
    let rhs = ah.mat_vec(b)?;
    solve_linear(&normal, &rhs)
}

/// Solves the square system `A x = b` by Gaussian elimination with partial
/// pivoting.
pub fn solve_linear(a: &DenseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "{n}x{n} system with right-hand side of length {}",
            b.len()
        )));
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = a.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !scale.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let tiny = scale * 1e-14 * n as f64;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .expect("non-empty range");
        if m[(pivot, col)].norm() <= tiny || scale == 0.0 {
            return Err(LinalgError::Singular);
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = tmp;
            }
            x.swap(col, pivot);
        }
        let d = m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / d;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = m[(col, k)];
                m[(r, k)] -= f * v;
            }
            let xc = x[col];
            x[r] -= f * xc;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in col + 1..n {
            acc -= m[(col, k)] * x[k];
        }
        x[col] = acc / m[(col, col)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn identity_returns_rhs() {
        let b = re(&[1.0, -2.0, 3.5]);
        let x = solve_regularized_lsq(&DenseMatrix::identity(3), &b, 0.0).unwrap();
        for (u, v) in x.iter().zip(&b) {
            assert!((u - v).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_matrix_with_ridge_gives_zero() {
        let x = solve_regularized_lsq(&DenseMatrix::zeros(2, 2), &re(&[1.0, 1.0]), 0.5).unwrap();
        assert!(x.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn zero_matrix_without_ridge_is_singular() {
        assert_eq!(
            solve_regularized_lsq(&DenseMatrix::zeros(2, 2), &re(&[1.0, 1.0]), 0.0),
            Err(LinalgError::Singular)
        );
    }

    #[test]
    fn dimension_mismatch() {
        assert!(solve_regularized_lsq(&DenseMatrix::identity(2), &re(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let a = DenseMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let x = solve_linear(&a, &re(&[3.0, 4.0])).unwrap();
        assert!((x[0].re - 4.0).abs() < 1e-15 && (x[1].re - 3.0).abs() < 1e-15);
    }
}
