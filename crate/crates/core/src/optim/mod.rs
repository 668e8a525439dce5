//! Classical optimizers and gradient strategies.
//!
//! Two optimizers are provided: a derivative-free Nelder-Mead simplex and
//! steepest descent with Armijo backtracking. Both read their settings from a
//! [`HeterogeneousMap`]:
//!
//! | key               | kind       | default        |
//! |-------------------|------------|----------------|
//! | `max-iterations`  | integer    | 500            |
//! | `tolerance`       | real       | 1e-8           |
//! | `initial-point`   | real list  | all zeros      |
//! | `initial-step`    | real       | 0.1 (simplex), 1.0 (descent) |
//! | `lower-bounds`    | real list  | unbounded      |
//! | `upper-bounds`    | real list  | unbounded      |
//!
//! When bounds are set every trial point is projected into the box before
//! the objective is called.

mod gradient;
mod gradient_descent;
mod nelder_mead;

use thiserror::Error;

use crate::registry::{self, HeterogeneousMap, MapError, RegistryError};

pub use gradient::{
    compute_gradient, gradient_strategy, Contribution, Difference, FiniteDifference, GradientError, GradientRequest,
    GradientStrategy, ParameterShift, GRADIENT_STRATEGIES,
};
pub use gradient_descent::GradientDescent;
pub use nelder_mead::NelderMead;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OptimError {
    #[error("objective dimension must be at least 1")]
    ZeroDimension,
    #[error("{what} has length {found}, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid option `{key}`: {reason}")]
    InvalidOption { key: String, reason: String },
    #[error("objective returned a non-finite value {value} at x = {x:?}")]
    NonFinite { value: f64, x: Vec<f64> },
    #[error("objective failed: {0}")]
    Objective(String),
    #[error(transparent)]
    Options(#[from] MapError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

type ObjectiveFn<'a> = dyn FnMut(&[f64], &mut [f64]) -> f64 + 'a;

/// `F: R^n -> R`, optionally with its gradient.
///
/// The callable receives the point and a gradient slice. The slice is empty
/// when only the value is needed; otherwise it has length `dim` and must be
/// filled if `provides_gradient` is set. Objectives without a gradient must
/// leave it untouched.
pub struct ObjectiveFunction<'a> {
    f: Box<ObjectiveFn<'a>>,
    dim: usize,
    provides_gradient: bool,
    evaluations: usize,
}

impl<'a> ObjectiveFunction<'a> {
    pub fn new(dim: usize, f: impl FnMut(&[f64], &mut [f64]) -> f64 + 'a) -> Self {
        ObjectiveFunction {
            f: Box::new(f),
            dim,
            provides_gradient: false,
            evaluations: 0,
        }
    }

    /// An objective that fills the gradient slice when it is non-empty.
    pub fn with_gradient(dim: usize, f: impl FnMut(&[f64], &mut [f64]) -> f64 + 'a) -> Self {
        ObjectiveFunction {
            provides_gradient: true,
            ..Self::new(dim, f)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provides_gradient(&self) -> bool {
        self.provides_gradient
    }

    /// Number of calls made so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn check(&self, x: &[f64], v: f64) -> Result<f64, OptimError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(OptimError::NonFinite { value: v, x: x.to_vec() })
        }
    }

    /// `F(x)`.
    pub fn value(&mut self, x: &[f64]) -> Result<f64, OptimError> {
        self.evaluations += 1;
        let v = (self.f)(x, &mut []);
        self.check(x, v)
    }

    /// `F(x)` and its gradient; the gradient comes from the callable when
    /// available and from central differences with step `h` otherwise.
    pub fn value_and_gradient(&mut self, x: &[f64], h: f64, bounds: &Bounds) -> Result<(f64, Vec<f64>), OptimError> {
        let mut g = vec![0.0; self.dim];
        if self.provides_gradient {
            self.evaluations += 1;
            let v = (self.f)(x, &mut g);
            let v = self.check(x, v)?;
            if let Some(i) = g.iter().position(|d| !d.is_finite()) {
                return Err(OptimError::NonFinite { value: g[i], x: x.to_vec() });
            }
            return Ok((v, g));
        }
        let v = self.value(x)?;
        let mut xp = x.to_vec();
        for i in 0..self.dim {
            xp[i] = x[i] + h;
            bounds.project(&mut xp);
            let hi = xp[i];
            let fp = self.value(&xp)?;
            xp[i] = x[i] - h;
            bounds.project(&mut xp);
            let lo = xp[i];
            let fm = self.value(&xp)?;
            xp[i] = x[i];
            g[i] = if hi > lo { (fp - fm) / (hi - lo) } else { 0.0 };
        }
        Ok((v, g))
    }
}

/// Outcome of an optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult {
    /// Lowest objective value seen; equals `F(opt_params)`.
    pub opt_val: f64,
    pub opt_params: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Box constraints; missing sides are infinite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bounds {
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
}

impl Bounds {
    pub fn from_options(options: &HeterogeneousMap, dim: usize) -> Result<Self, OptimError> {
        let lower: Option<Vec<f64>> = options.get_opt("lower-bounds")?;
        let upper: Option<Vec<f64>> = options.get_opt("upper-bounds")?;
        for (key, b) in [("lower-bounds", &lower), ("upper-bounds", &upper)] {
            if let Some(b) = b {
                if b.len() != dim {
                    return Err(OptimError::InvalidOption {
                        key: key.into(),
                        reason: format!("expected {dim} entries, got {}", b.len()),
                    });
                }
            }
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if let Some(i) = (0..dim).find(|&i| l[i] > u[i]) {
                return Err(OptimError::InvalidOption {
                    key: "lower-bounds".into(),
                    reason: format!("entry {i} exceeds the upper bound"),
                });
            }
        }
        Ok(Bounds { lower, upper })
    }

    /// Clamps `x` into the box.
    pub fn project(&self, x: &mut [f64]) {
        if let Some(l) = &self.lower {
            for (v, &b) in x.iter_mut().zip(l) {
                *v = v.max(b);
            }
        }
        if let Some(u) = &self.upper {
            for (v, &b) in x.iter_mut().zip(u) {
                *v = v.min(b);
            }
        }
    }
}

/// Settings shared by the built-in optimizers.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Settings {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub initial_step: f64,
    pub bounds: Bounds,
}

impl Settings {
    /// Checks value kinds and ranges of every shared key; bound lengths are
    /// checked once the dimension is known.
    pub fn validate(options: &HeterogeneousMap) -> Result<(), OptimError> {
        for key in ["lower-bounds", "upper-bounds", "initial-point"] {
            options.get_opt::<Vec<f64>>(key)?;
        }
        Self::read(options, None, 1.0).map(|_| ())
    }

    pub fn read(options: &HeterogeneousMap, dim: Option<usize>, default_step: f64) -> Result<Self, OptimError> {
        let max_iterations = options.get_or::<i64>("max-iterations", 500)?;
        if max_iterations < 0 {
            return Err(invalid("max-iterations", "must be non-negative"));
        }
        let tolerance = options.get_or::<f64>("tolerance", 1e-8)?;
        if !(tolerance >= 0.0) {
            return Err(invalid("tolerance", "must be non-negative"));
        }
        let initial_step = options.get_or::<f64>("initial-step", default_step)?;
        if !(initial_step > 0.0 && initial_step.is_finite()) {
            return Err(invalid("initial-step", "must be positive"));
        }
        Ok(Settings {
            max_iterations: max_iterations as usize,
            tolerance,
            initial_step,
            bounds: match dim {
                Some(d) => Bounds::from_options(options, d)?,
                None => Bounds::default(),
            },
        })
    }
}

pub(crate) fn invalid(key: &str, reason: &str) -> OptimError {
    OptimError::InvalidOption {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

/// Starting point from `initial-point`, or zeros.
pub fn initial_point(options: &HeterogeneousMap, dim: usize) -> Result<Vec<f64>, OptimError> {
    match options.get_opt::<Vec<f64>>("initial-point")? {
        Some(x) if x.len() != dim => Err(OptimError::Dimension {
            what: "initial-point",
            expected: dim,
            found: x.len(),
        }),
        Some(x) => Ok(x),
        None => Ok(vec![0.0; dim]),
    }
}

/// The classical outer loop.
pub trait Optimizer: Send + Sync {
    fn name(&self) -> &str;

    /// Replaces the option set after validating the keys this optimizer
    /// understands.
    fn set_options(&mut self, options: HeterogeneousMap) -> Result<(), OptimError>;

    fn options(&self) -> &HeterogeneousMap;

    /// Minimizes `f` starting from `x0`.
    fn minimize(&self, f: &mut ObjectiveFunction<'_>, x0: &[f64]) -> Result<OptimizerResult, OptimError>;

    /// Minimizes `f` from the configured `initial-point`.
    fn optimize(&self, f: &mut ObjectiveFunction<'_>) -> Result<OptimizerResult, OptimError> {
        let x0 = initial_point(self.options(), f.dim())?;
        self.minimize(f, &x0)
    }
}

pub(crate) fn check_start(f: &ObjectiveFunction<'_>, x0: &[f64]) -> Result<(), OptimError> {
    if f.dim() == 0 {
        return Err(OptimError::ZeroDimension);
    }
    if x0.len() != f.dim() {
        return Err(OptimError::Dimension {
            what: "starting point",
            expected: f.dim(),
            found: x0.len(),
        });
    }
    Ok(())
}

/// Looks up `name` in the global registry, applies `options` and optimizes.
pub fn optimize(
    name: &str,
    options: HeterogeneousMap,
    f: &mut ObjectiveFunction<'_>,
) -> Result<OptimizerResult, OptimError> {
    let mut opt = registry::get_optimizer(name)?;
    opt.set_options(options)?;
    opt.optimize(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_optimizer() {
        let mut f = ObjectiveFunction::new(1, |x, _| x[0] * x[0]);
        assert!(matches!(
            optimize("l-bfgs-x", HeterogeneousMap::new(), &mut f),
            Err(OptimError::Registry(RegistryError::ServiceNotFound { .. }))
        ));
    }

    #[test]
    fn gradient_slice_untouched_without_gradient() {
        let mut f = ObjectiveFunction::new(2, |x, g| {
            assert!(g.is_empty());
            x[0] + x[1]
        });
        let (v, g) = f.value_and_gradient(&[1.0, 2.0], 1e-4, &Bounds::default()).unwrap();
        assert_eq!(v, 3.0);
        assert!((g[0] - 1.0).abs() < 1e-9 && (g[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_project() {
        let opts = HeterogeneousMap::new()
            .with("lower-bounds", vec![0.0, -1.0])
            .with("upper-bounds", vec![1.0, 1.0]);
        let b = Bounds::from_options(&opts, 2).unwrap();
        let mut x = [2.0, -3.0];
        b.project(&mut x);
        assert_eq!(x, [1.0, -1.0]);
        assert!(Bounds::from_options(&opts, 3).is_err());
    }

    #[test]
    fn nan_objective_aborts() {
        let mut f = ObjectiveFunction::new(1, |_, _| f64::NAN);
        let r = optimize("nelder-mead", HeterogeneousMap::new(), &mut f);
        assert!(matches!(r, Err(OptimError::NonFinite { .. })));
    }
}
