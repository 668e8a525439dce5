//! Hermitian and generalized Hermitian eigenproblems.

use num_complex::Complex64;

use super::{DenseMatrix, LinalgError};

/// Tolerance on the input's deviation from Hermiticity.
const HERMITIAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &DenseMatrix) -> Result<Eigen, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let deviation = m.hermitian_deviation();
    let scale = m.frobenius_norm().max(1.0);
    if deviation > HERMITIAN_TOL * scale {
        return Err(LinalgError::NotHermitian { deviation });
    }

    let n = m.rows();
    // Work on the exactly Hermitian part.
    let mut a = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let mut v = DenseMatrix::identity(n);
    let norm = a.frobenius_norm();

    if norm > 0.0 {
        let target = (f64::EPSILON * norm).powi(2);
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_sqr(&a) <= target {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q, norm);
                }
            }
        }
        if !converged && off_diagonal_sqr(&a) > target * 1e6 {
            return Err(LinalgError::NoConvergence("Jacobi eigensolver"));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

fn off_diagonal_sqr(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// One Jacobi step annihilating `a[p][q]`: a phase on column `q` makes the
/// pivot real, then a real plane rotation zeroes it.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, norm: f64) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= 1e-300 || mag < f64::EPSILON * 1e-3 * norm {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Columns p, q of the unitary W.
    let w_pp = Complex64::new(c, 0.0);
    let w_pq = Complex64::new(s, 0.0);
    let w_qp = -phase.conj() * s;
    let w_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * w_pp + vkq * w_qp;
        v[(k, q)] = vkp * w_pq + vkq * w_qq;
    }
}

/// Solution of the pencil `M x = E S x` restricted to the well-conditioned
/// part of `S`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Generalized eigenvectors in the original basis, one per column,
    /// normalized so that `x† S x = 1`.
    pub vectors: DenseMatrix,
    /// Number of retained `S` eigenvalues above the threshold.
    pub rank: usize,
}

/// Eigenvalues of `M x = E S x` by canonical orthogonalization.
pub fn generalized_eig(
    m: &DenseMatrix,
    s: &DenseMatrix,
    threshold: f64,
) -> Result<Vec<f64>, LinalgError> {
    generalized_eig_full(m, s, threshold).map(|g| g.values)
}

/// Like [`generalized_eig`] but also returns eigenvectors and the rank of `S`.
pub fn generalized_eig_full(
    m: &DenseMatrix,
    s: &DenseMatrix,
    threshold: f64,
) -> Result<GeneralizedEigen, LinalgError> {
    if !m.is_square() || !s.is_square() || m.rows() != s.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "pencil needs two equal square matrices, got {}x{} and {}x{}",
            m.rows(),
            m.cols(),
            s.rows(),
            s.cols()
        )));
    }
    let se = hermitian_eig(s)?;
    if let Some(&lowest) = se.values.first() {
        if lowest < -threshold {
            return Err(LinalgError::NegativeOverlap {
                value: lowest,
                threshold,
            });
        }
    }
    let keep: Vec<usize> = (0..se.values.len())
        .filter(|&i| se.values[i] > threshold)
        .collect();
    let n = m.rows();
    let x = DenseMatrix::from_fn(n, keep.len(), |r, c| {
        let k = keep[c];
        se.vectors[(r, k)] / se.values[k].sqrt()
    });
    let projected = x.adjoint().matmul(m)?.matmul(&x)?;
    let inner = hermitian_eig(&projected)?;
    Ok(GeneralizedEigen {
        values: inner.values,
        vectors: x.matmul(&inner.vectors)?,
        rank: keep.len(),
    })
}
