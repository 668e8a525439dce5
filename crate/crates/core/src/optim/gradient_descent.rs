//! Steepest descent with Armijo backtracking.

use super::{check_start, invalid, ObjectiveFunction, OptimError, Optimizer, OptimizerResult, Settings};
use crate::registry::HeterogeneousMap;

/// Sufficient-decrease constant of the Armijo condition.
const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Projected steepest descent.
///
/// Each iteration tries the step `x - t g`, halving `t` until the Armijo
/// condition holds; the accepted step length, doubled, seeds the next line
/// search. Gradients come from the objective when it provides them and from
/// central differences with step `fd-step` (default 1e-6) otherwise. The run
/// stops when `|dF| < tolerance`, when the gradient norm drops below
/// `gradient-tolerance` (default 1e-10), when no step decreases the
/// objective, or after `max-iterations`.
#[derive(Debug, Clone, Default)]
pub struct GradientDescent {
    options: HeterogeneousMap,
}

impl GradientDescent {
    pub fn new(options: HeterogeneousMap) -> Result<Self, OptimError> {
        let mut gd = Self::default();
        gd.set_options(options)?;
        Ok(gd)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Optimizer for GradientDescent {
    fn name(&self) -> &str {
        "gradient-descent"
    }

    fn set_options(&mut self, options: HeterogeneousMap) -> Result<(), OptimError> {
        Settings::validate(&options)?;
        for key in ["fd-step", "gradient-tolerance"] {
            if let Some(v) = options.get_opt::<f64>(key)? {
                if !(v > 0.0) {
                    return Err(invalid(key, "must be positive"));
                }
            }
        }
        self.options = options;
        Ok(())
    }

    fn options(&self) -> &HeterogeneousMap {
        &self.options
    }

    fn minimize(&self, f: &mut ObjectiveFunction<'_>, x0: &[f64]) -> Result<OptimizerResult, OptimError> {
        check_start(f, x0)?;
        let s = Settings::read(&self.options, Some(f.dim()), 1.0)?;
        let h = self.options.get_or::<f64>("fd-step", 1e-6)?;
        let gtol = self.options.get_or::<f64>("gradient-tolerance", 1e-10)?;
        let start = f.evaluations();

        let mut x = x0.to_vec();
        s.bounds.project(&mut x);
        let (mut fx, mut g) = f.value_and_gradient(&x, h, &s.bounds)?;
        let mut t0 = s.initial_step;
        let mut iterations = 0;
        let mut converged = false;
        while iterations < s.max_iterations {
            if dot(&g, &g).sqrt() <= gtol {
                converged = true;
                break;
            }
            iterations += 1;
            let mut t = t0;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let mut xn: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
                s.bounds.project(&mut xn);
                let step: Vec<f64> = x.iter().zip(&xn).map(|(a, b)| a - b).collect();
                let fxn = f.value(&xn)?;
                if fxn <= fx - ARMIJO_C * dot(&g, &step) && fxn < fx {
                    accepted = Some((xn, fxn));
                    break;
                }
                t *= 0.5;
            }
            let Some((xn, fxn)) = accepted else {
                converged = true;
                break;
            };
            let df = fx - fxn;
            x = xn;
            let (fv, gv) = f.value_and_gradient(&x, h, &s.bounds)?;
            fx = fv;
            g = gv;
            t0 = (2.0 * t).min(s.initial_step.max(1.0) * 1e3);
            if df.abs() < s.tolerance {
                converged = true;
                break;
            }
        }
        Ok(OptimizerResult {
            opt_val: fx,
            opt_params: x,
            iterations,
            evaluations: f.evaluations() - start,
            converged,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_gradient_bowl() {
        let mut f = ObjectiveFunction::with_gradient(2, |x, g| {
            if !g.is_empty() {
                g[0] = 2.0 * x[0];
                g[1] = 2.0 * x[1];
            }
            x[0] * x[0] + x[1] * x[1]
        });
        let opts = HeterogeneousMap::new().with("initial-point", vec![1.5, -0.7]);
        let r = GradientDescent::new(opts).unwrap().optimize(&mut f).unwrap();
        assert!(r.opt_params.iter().all(|v| v.abs() < 1e-6), "{r:?}");
    }

    #[test]
    fn finite_difference_fallback() {
        let mut f = ObjectiveFunction::new(2, |x, _| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2));
        let r = GradientDescent::default().optimize(&mut f).unwrap();
        assert!((r.opt_params[0] - 1.0).abs() < 1e-4 && (r.opt_params[1] + 0.5).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn bounded_descent_stays_inside() {
        let mut outside = false;
        let mut f = ObjectiveFunction::new(1, |x, _| {
            if x[0] < 1.0 {
                outside = true;
            }
            x[0] * x[0]
        });
        let opts = HeterogeneousMap::new()
            .with("lower-bounds", vec![1.0])
            .with("initial-point", vec![4.0]);
        let r = GradientDescent::new(opts).unwrap().optimize(&mut f).unwrap();
        drop(f);
        assert!(!outside);
        assert!((r.opt_params[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_options() {
        assert!(GradientDescent::new(HeterogeneousMap::new().with("fd-step", -1.0)).is_err());
        assert!(GradientDescent::new(HeterogeneousMap::new().with("tolerance", "small")).is_err());
    }
}
