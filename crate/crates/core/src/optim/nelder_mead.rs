//! Nelder-Mead downhill simplex.

use super::{check_start, ObjectiveFunction, OptimError, Optimizer, OptimizerResult, Settings};
use crate::registry::HeterogeneousMap;

/// Derivative-free simplex search with the standard reflection (1),
/// expansion (2), contraction (1/2) and shrink (1/2) coefficients.
///
/// The initial simplex is `x0` plus `x0 + initial-step * e_i`. The run stops
/// when the spread of objective values over the simplex drops below
/// `tolerance` and the simplex diameter below `x-tolerance` (default 1e-6),
/// or after `max-iterations` iterations.
#[derive(Debug, Clone, Default)]
pub struct NelderMead {
    options: HeterogeneousMap,
}

impl NelderMead {
    pub fn new(options: HeterogeneousMap) -> Result<Self, OptimError> {
        let mut nm = Self::default();
        nm.set_options(options)?;
        Ok(nm)
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

impl Optimizer for NelderMead {
    fn name(&self) -> &str {
        "nelder-mead"
    }

    fn set_options(&mut self, options: HeterogeneousMap) -> Result<(), OptimError> {
        options.get_opt::<f64>("x-tolerance")?;
        Settings::validate(&options)?;
        self.options = options;
        Ok(())
    }

    fn options(&self) -> &HeterogeneousMap {
        &self.options
    }

    fn minimize(&self, f: &mut ObjectiveFunction<'_>, x0: &[f64]) -> Result<OptimizerResult, OptimError> {
        check_start(f, x0)?;
        let n = f.dim();
        let s = Settings::read(&self.options, Some(n), 0.1)?;
        let xtol = self.options.get_or::<f64>("x-tolerance", 1e-6)?;
        let start = f.evaluations();

        let eval = |f: &mut ObjectiveFunction<'_>, mut x: Vec<f64>| -> Result<(Vec<f64>, f64), OptimError> {
            s.bounds.project(&mut x);
            let v = f.value(&x)?;
            Ok((x, v))
        };

        let mut simplex = Vec::with_capacity(n + 1);
        simplex.push(eval(f, x0.to_vec())?);
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += s.initial_step;
            simplex.push(eval(f, x)?);
        }

        let mut iterations = 0;
        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[n].1);
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if (worst - best).abs() <= s.tolerance && diameter <= xtol {
                converged = true;
                break;
            }
            if iterations >= s.max_iterations {
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / n as f64;
                }
            }
            let xw = simplex[n].0.clone();
            let (xr, fr) = eval(f, lerp(&centroid, &xw, -1.0))?;
            if fr < best {
                let (xe, fe) = eval(f, lerp(&centroid, &xw, -2.0))?;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst {
                eval(f, lerp(&centroid, &xr, 0.5))?
            } else {
                eval(f, lerp(&centroid, &xw, 0.5))?
            };
            if fc < fr.min(worst) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                *v = eval(f, lerp(&x_best, &v.0, 0.5))?;
            }
        }
        let (opt_params, opt_val) = simplex.swap_remove(0);
        Ok(OptimizerResult {
            opt_val,
            opt_params,
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
    fn quadratic_bowl_1d() {
        let mut f = ObjectiveFunction::new(1, |x, _| (x[0] - 2.0).powi(2));
        let r = NelderMead::default().optimize(&mut f).unwrap();
        assert!((r.opt_params[0] - 2.0).abs() < 1e-4, "{:?}", r);
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock() {
        let mut f = ObjectiveFunction::new(2, |x, _| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let opts = HeterogeneousMap::new().with("max-iterations", 2000i64).with("tolerance", 1e-14);
        let r = NelderMead::new(opts).unwrap().optimize(&mut f).unwrap();
        assert!((r.opt_params[0] - 1.0).abs() < 1e-4 && (r.opt_params[1] - 1.0).abs() < 1e-4, "{:?}", r);
    }

    #[test]
    fn respects_bounds() {
        let mut outside = false;
        let mut f = ObjectiveFunction::new(2, |x, _| {
            if x[0] < 0.5 || x[1] > 0.0 {
                outside = true;
            }
            x[0] * x[0] + x[1] * x[1]
        });
        let opts = HeterogeneousMap::new()
            .with("lower-bounds", vec![0.5, -10.0])
            .with("upper-bounds", vec![10.0, 0.0])
            .with("initial-point", vec![3.0, -2.0]);
        let r = NelderMead::new(opts).unwrap().optimize(&mut f).unwrap();
        drop(f);
        assert!(!outside);
        assert!((r.opt_params[0] - 0.5).abs() < 1e-4 && r.opt_params[1].abs() < 1e-4);
    }

    #[test]
    fn opt_val_matches_params() {
        let obj = |x: &[f64], _: &mut [f64]| (x[0] - 0.3).powi(2) + (x[1] + 1.2).powi(4) + 0.7;
        let mut f = ObjectiveFunction::new(2, obj);
        let r = NelderMead::default().optimize(&mut f).unwrap();
        assert_eq!(r.opt_val, obj(&r.opt_params, &mut []));
    }
}
