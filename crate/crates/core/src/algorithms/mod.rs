//! The [`Algorithm`] contract and the chemistry algorithms built on it.
//!
//! Every algorithm is configured from a [`HeterogeneousMap`] and writes its
//! results into the metadata of an [`AcceleratorBuffer`]. Result keys:
//!
//! | key | writer |
//! |-----|--------|
//! | `opt-val` | all |
//! | `opt-params`, `energy-history` | vqe, adapt (params), qite (history) |
//! | `adapt-ops`, `adapt-gradient-norms` | adapt |
//! | `cmx-energies`, `pds-energies`, `knowles-energies` | qcmx |
//! | `excitation-energies`, `qeom-matrix-rank` | qeom |

mod adapt;
mod estimator;
mod qcmx;
mod qeom;
mod qite;
mod vqe;

use std::sync::Arc;

use thiserror::Error;

use crate::ansatz::AnsatzError;
use crate::backend::{Accelerator, AcceleratorBuffer, BackendError};
use crate::fermion::FermionError;
use crate::ir::{CompositeInstruction, IrError};
use crate::linalg::LinalgError;
use crate::optim::{GradientError, OptimError};
use crate::pauli::{PauliError, PauliOperator};
use crate::registry::{self, FromValue, HeterogeneousMap, MapError, RegistryError};

pub use adapt::{pool_gradients, Adapt};
pub use qcmx::{cmx_estimate, knowles_estimate, moment_table, pds_estimate, MomentTable, Qcmx};
pub use qeom::{excitation_basis, qeom_from_state, Qeom, QeomResult};
pub use qite::{pauli_basis, Qite};
pub use vqe::Vqe;

#[derive(Debug, Error)]
pub enum AlgorithmError {
    #[error("invalid options: {0}")]
    Options(#[from] MapError),
    #[error("option `{key}`: {reason}")]
    InvalidOption { key: String, reason: String },
    #[error("algorithm `{0}` was executed before initialize")]
    NotInitialized(&'static str),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error(transparent)]
    Gradient(#[from] GradientError),
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Fermion(#[from] FermionError),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("operator pool `{0}` is empty")]
    EmptyPool(String),
    #[error("excitation operator basis is empty")]
    EmptyBasis,
    #[error("every direction of the overlap matrix is singular")]
    SingularOverlap,
    #[error("observable is not Hermitian")]
    NotHermitian,
    #[error("buffer has {size} qubits but the problem needs {needed}")]
    BufferTooSmall { size: usize, needed: usize },
}

pub(crate) fn invalid(key: &str, reason: impl Into<String>) -> AlgorithmError {
    AlgorithmError::InvalidOption {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// A named hybrid algorithm.
pub trait Algorithm: Send + Sync {
    fn name(&self) -> &str;

    /// Validates and stores the options; required keys depend on the
    /// algorithm.
    fn initialize(&mut self, options: HeterogeneousMap) -> Result<(), AlgorithmError>;

    /// Runs on `buffer`, writing results into its metadata.
    fn execute(&self, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError>;
}

/// An algorithm name plus its options.
#[derive(Debug, Clone)]
pub struct AlgorithmSpec {
    pub name: String,
    pub options: HeterogeneousMap,
}

impl AlgorithmSpec {
    pub fn new(name: impl Into<String>, options: HeterogeneousMap) -> Self {
        AlgorithmSpec {
            name: name.into(),
            options,
        }
    }

    /// Looks the algorithm up in the global registry, initializes and runs it.
    pub fn run(&self, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
        let mut alg = registry::get_algorithm(&self.name)?;
        alg.initialize(self.options.clone())?;
        alg.execute(buffer)
    }
}

fn run_with(mut alg: impl Algorithm, options: HeterogeneousMap, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
    alg.initialize(options)?;
    alg.execute(buffer)
}

pub fn run_vqe(options: HeterogeneousMap, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
    run_with(Vqe::default(), options, buffer)
}

pub fn run_adapt(options: HeterogeneousMap, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
    run_with(Adapt::default(), options, buffer)
}

pub fn run_qite(options: HeterogeneousMap, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
    run_with(Qite::default(), options, buffer)
}

pub fn run_qcmx(options: HeterogeneousMap, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
    run_with(Qcmx::default(), options, buffer)
}

pub fn run_qeom(options: HeterogeneousMap, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
    run_with(Qeom::default(), options, buffer)
}

// Option helpers shared by the algorithms.

pub(crate) fn required<T: FromValue>(options: &HeterogeneousMap, key: &str) -> Result<T, AlgorithmError> {
    Ok(options.get::<T>(key)?)
}

/// A real option that may also be written as an integer.
pub(crate) fn real_option(options: &HeterogeneousMap, key: &str) -> Result<Option<f64>, AlgorithmError> {
    match options.get_opt::<f64>(key) {
        Ok(v) => Ok(v),
        Err(MapError::TypeMismatch { .. }) => Ok(Some(options.get::<i64>(key)? as f64)),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn count_option(options: &HeterogeneousMap, key: &str) -> Result<Option<usize>, AlgorithmError> {
    match options.get_opt::<i64>(key)? {
        Some(v) if v < 0 => Err(invalid(key, format!("must be non-negative, got {v}"))),
        Some(v) => Ok(Some(v as usize)),
        None => Ok(None),
    }
}

pub(crate) fn hermitian_observable(options: &HeterogeneousMap) -> Result<Arc<PauliOperator>, AlgorithmError> {
    let obs = required::<Arc<PauliOperator>>(options, "observable")?;
    if !obs.is_hermitian() {
        return Err(AlgorithmError::NotHermitian);
    }
    Ok(obs)
}

/// The ansatz, bound to `ansatz-parameters` when those are given.
pub(crate) fn concrete_ansatz(options: &HeterogeneousMap) -> Result<CompositeInstruction, AlgorithmError> {
    let ansatz = required::<Arc<CompositeInstruction>>(options, "ansatz")?;
    match options.get_opt::<Vec<f64>>("ansatz-parameters")? {
        Some(x) => Ok(ansatz.evaluate(&x)?),
        None if ansatz.n_variables() > 0 => Err(invalid(
            "ansatz",
            format!("has {} free variable(s); supply ansatz-parameters", ansatz.n_variables()),
        )),
        None => Ok((*ansatz).clone()),
    }
}

/// Register size needed for `obs` and `circuit`, checked against `buffer`.
pub(crate) fn register_size(
    buffer: &AcceleratorBuffer,
    obs: &PauliOperator,
    circuit: &CompositeInstruction,
) -> Result<usize, AlgorithmError> {
    let needed = obs.n_qubits().max(circuit.n_qubits()).max(1);
    if buffer.size() < needed {
        return Err(AlgorithmError::BufferTooSmall {
            size: buffer.size(),
            needed,
        });
    }
    Ok(needed)
}

pub(crate) fn accelerator(options: &HeterogeneousMap) -> Result<Arc<dyn Accelerator>, AlgorithmError> {
    required::<Arc<dyn Accelerator>>(options, "accelerator")
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::backend::{AcceleratorConfig, StatevectorAccelerator};
    use crate::linalg::hermitian_eig;
    use crate::pauli::parse_hamiltonian;

    pub fn h2() -> PauliOperator {
        parse_hamiltonian("0.2976\n0.3593 Z0\n-0.4826 Z1\n0.5818 Z0 Z1\n0.0896 X0 X1\n0.0896 Y0 Y1\n").unwrap()
    }

    pub fn ground(obs: &PauliOperator) -> f64 {
        hermitian_eig(&obs.to_matrix(obs.n_qubits()).unwrap()).unwrap().values[0]
    }

    pub fn exact() -> Arc<dyn Accelerator> {
        Arc::new(StatevectorAccelerator::new(AcceleratorConfig::exact()).unwrap())
    }

    pub fn sampled(shots: i64) -> Arc<dyn Accelerator> {
        Arc::new(StatevectorAccelerator::new(AcceleratorConfig::sampled(shots, 7)).unwrap())
    }
}
