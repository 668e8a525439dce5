//! Roots of real polynomials by Aberth-Ehrlich simultaneous iteration.

use num_complex::Complex64;

use super::LinalgError;

pub const MAX_POLY_DEGREE: usize = 16;
const MAX_ITER: usize = 500;

/// Evaluates `sum coeffs[k] x^k` by Horner's rule.
pub fn poly_eval(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn eval_with_derivative(coeffs: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// All complex roots of `sum coeffs[k] x^k` (coefficients in ascending
/// order). Roots are returned sorted by real part, then imaginary part.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, LinalgError> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let lead = match coeffs.last() {
        Some(&c) if c != 0.0 => c,
        _ => return Err(LinalgError::ZeroLeadingCoefficient),
    };
    let degree = coeffs.len() - 1;
    if degree > MAX_POLY_DEGREE {
        return Err(LinalgError::DegreeTooLarge(degree));
    }
    if degree == 0 {
        return Ok(Vec::new());
    }

    // Roots equal to zero are split off exactly.
    let zeros = coeffs.iter().take_while(|&&c| c == 0.0).count();
    let monic: Vec<f64> = coeffs[zeros..].iter().map(|&c| c / lead).collect();
    let d = monic.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];

    if d > 0 {
        // Cauchy bound on root moduli fixes the radius of the initial circle.
        let radius = 1.0 + monic[..d].iter().map(|c| c.abs()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..d)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
                Complex64::from_polar(0.5 * radius, angle)
            })
            .collect();

        let mut converged = false;
        for _ in 0..MAX_ITER {
            let mut max_step: f64 = 0.0;
            for i in 0..d {
                let (p, dp) = eval_with_derivative(&monic, z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..d)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let diff = z[i] - z[j];
                        if diff.norm() == 0.0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            diff.inv()
                        }
                    })
                    .sum();
                let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
                let step = if denom.norm() == 0.0 { ratio } else { ratio / denom };
                if step.re.is_finite() && step.im.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                converged = true;
                break;
            }
        }

        for zi in z.iter_mut() {
            polish(&monic, zi);
        }
        if !converged {
            let bound = 1e-8 * monic.iter().map(|c| c * c).sum::<f64>().sqrt();
            if z.iter().any(|&zi| poly_eval(&monic, zi).norm() > bound) {
                return Err(LinalgError::NoConvergence("polynomial root finder"));
            }
        }
        roots.extend(z);
    }

    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// A few Newton steps, kept only while they shrink the residual.
fn polish(coeffs: &[f64], z: &mut Complex64) {
    for _ in 0..5 {
        let (p, dp) = eval_with_derivative(coeffs, *z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            return;
        }
        let candidate = *z - p / dp;
        if poly_eval(coeffs, candidate).norm() < p.norm() {
            *z = candidate;
        } else {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let r = poly_roots(&[-1.0, 0.0, 1.0]).unwrap();
        assert!((r[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn linear() {
        let r = poly_roots(&[-3.0, 1.0]).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].re - 3.0).abs() < 1e-14 && r[0].im.abs() < 1e-14);
    }

    #[test]
    fn complex_pair() {
        let r = poly_roots(&[1.0, 0.0, 1.0]).unwrap();
        assert!((r[0].norm() - 1.0).abs() < 1e-14);
        assert!(r[0].re.abs() < 1e-14);
    }

    #[test]
    fn zero_root_split() {
        let r = poly_roots(&[0.0, -2.0, 1.0]).unwrap();
        assert_eq!(r[0], Complex64::new(0.0, 0.0));
        assert!((r[1].re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert_eq!(poly_roots(&[1.0, 0.0]), Err(LinalgError::ZeroLeadingCoefficient));
        assert_eq!(poly_roots(&[]), Err(LinalgError::ZeroLeadingCoefficient));
        assert_eq!(poly_roots(&[1.0; 18]), Err(LinalgError::DegreeTooLarge(17)));
    }
}
