//! Variational quantum eigensolver.

use std::cell::RefCell;
use std::sync::Arc;

use super::estimator::Estimator;
use super::{accelerator, hermitian_observable, register_size, required, AlgorithmError};
use crate::backend::{Accelerator, AcceleratorBuffer};
use crate::ir::CompositeInstruction;
use crate::optim::{compute_gradient, GradientStrategy, ObjectiveFunction, Optimizer, OptimizerResult};
use crate::pauli::PauliOperator;
use crate::registry::{self, HeterogeneousMap};

struct Config {
    ansatz: Arc<CompositeInstruction>,
    optimizer: Arc<dyn Optimizer>,
    observable: Arc<PauliOperator>,
    accelerator: Arc<dyn Accelerator>,
    gradient: Option<Box<dyn GradientStrategy>>,
    initial: Option<Vec<f64>>,
}

/// Minimizes `<psi(theta)|H|psi(theta)>` over the ansatz variables.
///
/// Options: `ansatz`, `optimizer`, `observable`, `accelerator`, optional
/// `gradient_strategy` (a registered strategy name) and optional
/// `initial-parameters` (overrides the optimizer's `initial-point`).
/// Writes `opt-val`, `opt-params` and `energy-history` (one entry per
/// objective evaluation).
#[derive(Default)]
pub struct Vqe {
    config: Option<Config>,
}

/// Result of one VQE minimization.
pub(crate) struct VqeOutcome {
    pub result: OptimizerResult,
    pub history: Vec<f64>,
}

impl Vqe {
    fn minimize(&self, c: &Config, n: usize) -> Result<VqeOutcome, AlgorithmError> {
        let est = Estimator::new(c.accelerator.as_ref(), n);
        let dim = c.ansatz.n_variables();
        if dim == 0 {
            let e = est.energy(&c.observable, &c.ansatz)?;
            return Ok(VqeOutcome {
                result: OptimizerResult {
                    opt_val: e,
                    opt_params: Vec::new(),
                    iterations: 0,
                    evaluations: 1,
                    converged: true,
                },
                history: vec![e],
            });
        }

        let history = RefCell::new(Vec::new());
        let failure = RefCell::new(None);
        let objective = |x: &[f64], g: &mut [f64]| -> f64 {
            let mut run = || -> Result<f64, AlgorithmError> {
                let e = est.energy(&c.observable, &c.ansatz.evaluate(x)?)?;
                if !g.is_empty() {
                    if let Some(strategy) = &c.gradient {
                        let req = strategy.shifted_circuits(&c.ansatz, x)?;
                        let values = req
                            .circuits
                            .iter()
                            .map(|s| est.energy(&c.observable, s))
                            .collect::<Result<Vec<_>, _>>()?;
                        g.copy_from_slice(&compute_gradient(&req, &values)?);
                    }
                }
                Ok(e)
            };
            match run() {
                Ok(e) => {
                    history.borrow_mut().push(e);
                    e
                }
                Err(err) => {
                    failure.borrow_mut().get_or_insert(err);
                    f64::NAN
                }
            }
        };
        let mut f = if c.gradient.is_some() {
            ObjectiveFunction::with_gradient(dim, objective)
        } else {
            ObjectiveFunction::new(dim, objective)
        };
        let result = match &c.initial {
            Some(x0) => c.optimizer.minimize(&mut f, x0),
            None => c.optimizer.optimize(&mut f),
        };
        drop(f);
        if let Some(err) = failure.into_inner() {
            return Err(err);
        }
        Ok(VqeOutcome {
            result: result?,
            history: history.into_inner(),
        })
    }

    /// Runs the minimization without touching a buffer's metadata.
    pub(crate) fn run(&self, buffer: &AcceleratorBuffer) -> Result<VqeOutcome, AlgorithmError> {
        let c = self.config.as_ref().ok_or(AlgorithmError::NotInitialized("vqe"))?;
        let n = register_size(buffer, &c.observable, &c.ansatz)?;
        self.minimize(c, n)
    }
}

impl super::Algorithm for Vqe {
    fn name(&self) -> &str {
        "vqe"
    }

    fn initialize(&mut self, options: HeterogeneousMap) -> Result<(), AlgorithmError> {
        let ansatz = required::<Arc<CompositeInstruction>>(&options, "ansatz")?;
        let initial = options.get_opt::<Vec<f64>>("initial-parameters")?;
        if let Some(x) = &initial {
            if x.len() != ansatz.n_variables() {
                return Err(super::invalid(
                    "initial-parameters",
                    format!("has {} entries but the ansatz has {} variables", x.len(), ansatz.n_variables()),
                ));
            }
        }
        let gradient = match options.get_opt::<String>("gradient_strategy")? {
            Some(name) => {
                let mut g = registry::get_gradient_strategy(&name)?;
                g.configure(&options)?;
                Some(g)
            }
            None => None,
        };
        self.config = Some(Config {
            ansatz,
            optimizer: required(&options, "optimizer")?,
            observable: hermitian_observable(&options)?,
            accelerator: accelerator(&options)?,
            gradient,
            initial,
        });
        Ok(())
    }

    fn execute(&self, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
        let out = self.run(buffer)?;
        buffer.set("opt-val", out.result.opt_val);
        buffer.set("opt-params", out.result.opt_params);
        buffer.set("energy-history", out.history);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::super::{run_vqe, Algorithm};
    use super::*;
    use crate::ansatz::{exp_pauli, uccsd_circuit, UccsdSpec, I};
    use crate::backend::qalloc;
    use crate::ir::{Gate, Instruction, Parameter};
    use crate::optim::{GradientDescent, NelderMead};

    /// X(q0) then exp(theta * i (X0 Y1 - Y0 X1) / 2).
    pub(crate) fn pair_rotation() -> CompositeInstruction {
        let mut c = CompositeInstruction::new("ansatz");
        c.add_instruction(Instruction::new(Gate::X, &[0], &[]).unwrap());
        let g = &(&PauliOperator::term(0.5 * I, "X0 Y1") - &PauliOperator::term(0.5 * I, "Y0 X1"));
        c.add_variable("theta");
        c.add_composite(exp_pauli(g, Parameter::var("theta")).unwrap());
        c
    }

    fn options(optimizer: Arc<dyn Optimizer>) -> HeterogeneousMap {
        HeterogeneousMap::new()
            .with("ansatz", pair_rotation())
            .with("optimizer", optimizer)
            .with("observable", h2())
            .with("accelerator", exact())
    }

    #[test]
    fn reaches_ground_state() {
        let mut buf = qalloc(2).unwrap();
        run_vqe(options(Arc::new(NelderMead::default())), &mut buf).unwrap();
        let e = buf.get::<f64>("opt-val").unwrap();
        assert!((e - ground(&h2())).abs() < 1e-6, "{e}");
        let hist = buf.get::<Vec<f64>>("energy-history").unwrap();
        assert!(hist.iter().all(|&h| h >= ground(&h2()) - 1e-9));
        assert_eq!(buf.get::<Vec<f64>>("opt-params").unwrap().len(), 1);
    }

    #[test]
    fn parameter_shift_gradients_drive_descent() {
        let mut buf = qalloc(2).unwrap();
        let opts = options(Arc::new(GradientDescent::default())).with("gradient_strategy", "parameter-shift");
        run_vqe(opts, &mut buf).unwrap();
        assert!((buf.get::<f64>("opt-val").unwrap() - ground(&h2())).abs() < 1e-6);
    }

    #[test]
    fn identity_observable() {
        let mut buf = qalloc(2).unwrap();
        let opts = options(Arc::new(NelderMead::default())).with("observable", PauliOperator::identity(-0.75));
        run_vqe(opts, &mut buf).unwrap();
        assert!((buf.get::<f64>("opt-val").unwrap() + 0.75).abs() < 1e-12);
    }

    #[test]
    fn uccsd_at_zero_is_hartree_fock() {
        let ansatz = uccsd_circuit(UccsdSpec::new(2, 4).unwrap()).unwrap();
        let obs = PauliOperator::term(1.0, "Z0") + PauliOperator::term(0.5, "Z1 Z2");
        let hf = crate::ansatz::hartree_fock_circuit(2, 4).unwrap();
        let acc = exact();
        let est = Estimator::new(acc.as_ref(), 4);
        let at_zero = est.energy(&obs, &ansatz.evaluate(&vec![0.0; ansatz.n_variables()]).unwrap()).unwrap();
        assert!((at_zero - est.energy(&obs, &hf).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn missing_keys_and_bad_initial_parameters() {
        let mut v = Vqe::default();
        assert!(matches!(
            v.initialize(HeterogeneousMap::new()),
            Err(AlgorithmError::Options(_))
        ));
        let opts = options(Arc::new(NelderMead::default())).with("initial-parameters", vec![0.0, 1.0]);
        assert!(matches!(v.initialize(opts), Err(AlgorithmError::InvalidOption { .. })));
        let mut buf = qalloc(2).unwrap();
        assert!(matches!(Vqe::default().execute(&mut buf), Err(AlgorithmError::NotInitialized(_))));
    }
}
