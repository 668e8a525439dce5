//! ADAPT-VQE: grow the ansatz one pool operator at a time.

use std::sync::Arc;

use super::estimator::Estimator;
use super::vqe::Vqe;
use super::{accelerator, count_option, hermitian_observable, invalid, real_option, required, Algorithm, AlgorithmError};
use crate::ansatz::{append_exp_pauli, reference_state_circuit, OperatorPool};
use crate::backend::{Accelerator, AcceleratorBuffer};
use crate::ir::{CompositeInstruction, Parameter};
use crate::optim::Optimizer;
use crate::pauli::PauliOperator;
use crate::registry::{self, HeterogeneousMap};

const DEFAULT_GRAD_THRESHOLD: f64 = 1e-2;
const DEFAULT_MAX_ITER: usize = 50;

struct Config {
    optimizer: Arc<dyn Optimizer>,
    observable: Arc<PauliOperator>,
    accelerator: Arc<dyn Accelerator>,
    n_electrons: usize,
    pool: String,
    grad_threshold: f64,
    max_iter: usize,
    /// Forwarded to each VQE sub-run.
    gradient_strategy: Option<String>,
}

/// ADAPT-VQE.
///
/// Options: `optimizer`, `observable`, `sub-algorithm` (must be `vqe`),
/// `n-electrons`, `pool` (a registered pool name), `accelerator`, optional
/// `grad-threshold` (default 1e-2), `max-iter` (default 50) and
/// `gradient_strategy` for the sub-runs.
///
/// Each iteration measures `g_i = <[H, A_i]>` for every pool generator at
/// the current state, stops when `|g| < grad-threshold`, and otherwise
/// appends `exp(theta A_k)` for the largest `|g_k|` and re-optimizes all
/// angles starting from the previous optimum with the new angle at zero.
/// Writes `opt-val`, `opt-params`, `adapt-ops` and `adapt-gradient-norms`
/// (one norm per measured gradient, including the final one).
#[derive(Default)]
pub struct Adapt {
    config: Option<Config>,
}

impl Algorithm for Adapt {
    fn name(&self) -> &str {
        "adapt"
    }

    fn initialize(&mut self, options: HeterogeneousMap) -> Result<(), AlgorithmError> {
        let sub = required::<String>(&options, "sub-algorithm")?;
        if sub != "vqe" {
            return Err(AlgorithmError::Unsupported(format!(
                "sub-algorithm `{sub}`; only `vqe` is available"
            )));
        }
        let grad_threshold = real_option(&options, "grad-threshold")?.unwrap_or(DEFAULT_GRAD_THRESHOLD);
        if !(grad_threshold >= 0.0) {
            return Err(invalid("grad-threshold", "must be non-negative"));
        }
        self.config = Some(Config {
            optimizer: required(&options, "optimizer")?,
            observable: hermitian_observable(&options)?,
            accelerator: accelerator(&options)?,
            n_electrons: count_option(&options, "n-electrons")?
                .ok_or_else(|| invalid("n-electrons", "required"))?,
            pool: required(&options, "pool")?,
            grad_threshold,
            max_iter: count_option(&options, "max-iter")?.unwrap_or(DEFAULT_MAX_ITER),
            gradient_strategy: options.get_opt::<String>("gradient_strategy")?,
        });
        Ok(())
    }

    fn execute(&self, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
        let c = self.config.as_ref().ok_or(AlgorithmError::NotInitialized("adapt"))?;
        let nq = c.observable.n_qubits();
        let pool: OperatorPool = registry::global()
            .get_operator_pool(&c.pool)?
            .build(c.n_electrons, nq)?;
        if pool.is_empty() {
            return Err(AlgorithmError::EmptyPool(c.pool.clone()));
        }
        let mut ansatz = reference_state_circuit(c.n_electrons, nq)?;
        ansatz.set_name("adapt");
        let n = super::register_size(buffer, &c.observable, &ansatz)?;
        let est = Estimator::new(c.accelerator.as_ref(), n);
        let commutators: Vec<PauliOperator> = pool
            .elements
            .iter()
            .map(|e| c.observable.commutator(&e.generator))
            .collect();

        let mut params: Vec<f64> = Vec::new();
        let mut chosen: Vec<String> = Vec::new();
        let mut norms: Vec<f64> = Vec::new();
        let mut energy = est.energy(&c.observable, &ansatz)?;
        loop {
            let state = est.prepare(&ansatz.evaluate(&params)?)?;
            let mut grads = Vec::with_capacity(commutators.len());
            for comm in &commutators {
                grads.push(est.expect(&state, comm)?.re);
            }
            let norm = grads.iter().map(|g| g * g).sum::<f64>().sqrt();
            norms.push(norm);
            if norm < c.grad_threshold || chosen.len() >= c.max_iter {
                break;
            }
            let best = (0..grads.len())
                .max_by(|&a, &b| grads[a].abs().total_cmp(&grads[b].abs()))
                .expect("pool is non-empty");
            let element = &pool.elements[best];
            let var = ansatz.add_variable(&format!("theta{}", chosen.len()));
            append_exp_pauli(&mut ansatz, &element.generator, &Parameter::scaled(1.0, var))?;
            chosen.push(element.label.clone());
            params.push(0.0);

            let mut sub_options = HeterogeneousMap::new()
                .with("ansatz", ansatz.clone())
                .with("optimizer", c.optimizer.clone())
                .with("observable", c.observable.clone())
                .with("accelerator", c.accelerator.clone())
                .with("initial-parameters", params.clone());
            if let Some(g) = &c.gradient_strategy {
                sub_options.insert("gradient_strategy", g.clone());
            }
            let mut vqe = Vqe::default();
            vqe.initialize(sub_options)?;
            let out = vqe.run(buffer)?;
            params = out.result.opt_params;
            energy = out.result.opt_val;
        }
        buffer.set("opt-val", energy);
        buffer.set("opt-params", params);
        buffer.set("adapt-ops", chosen);
        buffer.set("adapt-gradient-norms", norms);
        Ok(())
    }
}

/// `<psi|[H, A]|psi>` for every generator, from a prepared circuit.
pub fn pool_gradients(
    observable: &PauliOperator,
    pool: &OperatorPool,
    circuit: &CompositeInstruction,
    accelerator: &dyn Accelerator,
) -> Result<Vec<f64>, AlgorithmError> {
    let n = observable.n_qubits().max(circuit.n_qubits()).max(1);
    let est = Estimator::new(accelerator, n);
    let state = est.prepare(circuit)?;
    pool.elements
        .iter()
        .map(|e| Ok(est.expect(&state, &observable.commutator(&e.generator))?.re))
        .collect()
}
