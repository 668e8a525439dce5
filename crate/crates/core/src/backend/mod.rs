//! The accelerator contract, the result buffer and a noiseless statevector
//! accelerator.
//!
//! `shots = 0` selects exact mode: executing a circuit stores the exact
//! outcome distribution of its measured qubits instead of sampled counts.

mod simulate;

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ir::{CompositeInstruction, IrError};
use crate::pauli::{expectation_from_counts, observe, PauliError, PauliOperator, PauliTerm};
use crate::registry::{FromValue, HeterogeneousMap, MapError, Value};

pub use simulate::{statevector, zero_state};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BackendError {
    #[error("a qubit register needs at least one qubit")]
    ZeroQubits,
    #[error("shot count must be non-negative, got {0}")]
    NegativeShots(i64),
    #[error("{n} qubits exceeds the statevector limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("circuit `{0}` has unbound variables")]
    Symbolic(String),
    #[error("qubit {qubit} is outside a register of size {size}")]
    QubitOutOfRange { qubit: usize, size: usize },
    #[error("circuit `{circuit}` applies a gate to qubit {qubit} after measuring it")]
    NonTerminalMeasurement { circuit: String, qubit: usize },
    #[error("statevector requested for circuit `{0}`, which contains measurements")]
    MeasurementInStatevector(String),
    #[error("accelerator `{0}` does not expose its statevector")]
    Unsupported(String),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Execution settings passed to [`Accelerator::initialize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AcceleratorConfig {
    /// Shots per circuit; `0` selects exact mode.
    pub shots: i64,
    /// Seed for shot sampling. Unseeded accelerators draw from OS entropy.
    pub seed: Option<u64>,
}

impl AcceleratorConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn sampled(shots: i64, seed: u64) -> Self {
        AcceleratorConfig {
            shots,
            seed: Some(seed),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.shots == 0
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.shots < 0 {
            return Err(BackendError::NegativeShots(self.shots));
        }
        Ok(())
    }
}

/// Outcome record of one executed circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Name of the executed circuit.
    pub name: String,
    /// Sampled counts; empty in exact mode.
    pub counts: BTreeMap<String, u64>,
    /// Exact outcome probabilities; empty in sampled mode.
    pub probabilities: BTreeMap<String, f64>,
    pub shots: u64,
}

impl Measurement {
    /// `Re(c) <P>` for `term` from whichever distribution was recorded.
    pub fn expectation(&self, term: &PauliTerm) -> Result<f64, PauliError> {
        if self.shots == 0 {
            expectation_from_counts(term, &self.probabilities)
        } else {
            expectation_from_counts(term, &self.counts)
        }
    }
}

/// A qubit register handle that collects measurement records and result
/// metadata.
#[derive(Debug, Clone)]
pub struct AcceleratorBuffer {
    size: usize,
    measurements: Vec<Measurement>,
    metadata: HeterogeneousMap,
}

/// Allocates a register of `n` qubits.
pub fn qalloc(n: usize) -> Result<AcceleratorBuffer, BackendError> {
    if n == 0 {
        return Err(BackendError::ZeroQubits);
    }
    if n > MAX_QUBITS {
        return Err(BackendError::TooManyQubits { n, max: MAX_QUBITS });
    }
    Ok(AcceleratorBuffer {
        size: n,
        measurements: Vec::new(),
        metadata: HeterogeneousMap::new(),
    })
}

impl AcceleratorBuffer {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn last_measurement(&self) -> Option<&Measurement> {
        self.measurements.last()
    }

    pub fn clear_measurements(&mut self) {
        self.measurements.clear();
    }

    pub fn metadata(&self) -> &HeterogeneousMap {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut HeterogeneousMap {
        &mut self.metadata
    }

    /// Typed metadata lookup, e.g. `buffer.get::<f64>("opt-val")`.
    pub fn get<T: FromValue>(&self, key: &str) -> Result<T, MapError> {
        self.metadata.get(key)
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.metadata.insert(key, value);
    }
}

/// An execution backend.
pub trait Accelerator: Send + Sync {
    fn name(&self) -> &str;

    /// One-time configuration before use.
    fn initialize(&mut self, config: AcceleratorConfig) -> Result<(), BackendError>;

    fn config(&self) -> AcceleratorConfig;

    /// Runs each circuit from `|0...0>` and appends one [`Measurement`] per
    /// circuit to `buffer`.
    fn execute(
        &self,
        buffer: &mut AcceleratorBuffer,
        circuits: &[CompositeInstruction],
    ) -> Result<(), BackendError>;

    /// Final state of a measurement-free circuit, for backends that can
    /// expose it.
    fn statevector(&self, circuit: &CompositeInstruction, n: usize) -> Result<Vec<Complex64>, BackendError> {
        let _ = (circuit, n);
        Err(BackendError::Unsupported(self.name().to_string()))
    }
}

/// Noiseless dense statevector simulator.
#[derive(Debug)]
pub struct StatevectorAccelerator {
    config: AcceleratorConfig,
    rng: Mutex<ChaCha8Rng>,
}

impl Default for StatevectorAccelerator {
    fn default() -> Self {
        StatevectorAccelerator {
            config: AcceleratorConfig::default(),
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(0)),
        }
    }
}

impl StatevectorAccelerator {
    pub fn new(config: AcceleratorConfig) -> Result<Self, BackendError> {
        let mut a = Self::default();
        a.initialize(config)?;
        Ok(a)
    }

    fn run_one(&self, size: usize, circuit: &CompositeInstruction) -> Result<Measurement, BackendError> {
        let measured = simulate::terminal_measurements(circuit)?;
        let mut state = zero_state(size)?;
        simulate::evolve(&mut state, size, circuit)?;
        let dist = simulate::marginal(&state, size, &measured);
        let mut m = Measurement {
            name: circuit.name().to_string(),
            counts: BTreeMap::new(),
            probabilities: BTreeMap::new(),
            shots: self.config.shots as u64,
        };
        if self.config.is_exact() {
            for (idx, p) in dist {
                m.probabilities.insert(simulate::bitstring(idx, size), p);
            }
            return Ok(m);
        }
        let total: f64 = dist.iter().map(|d| d.1).sum();
        let mut cdf = Vec::with_capacity(dist.len());
        let mut acc = 0.0;
        for &(_, p) in &dist {
            acc += p / total;
            cdf.push(acc);
        }
        let mut hits = vec![0u64; dist.len()];
        {
            let mut rng = self.rng.lock().unwrap_or_else(|e| e.into_inner());
            for _ in 0..m.shots {
                let u: f64 = rng.random();
                let k = cdf.partition_point(|&c| c <= u).min(dist.len() - 1);
                hits[k] += 1;
            }
        }
        for ((idx, _), h) in dist.iter().zip(hits) {
            if h > 0 {
                m.counts.insert(simulate::bitstring(*idx, size), h);
            }
        }
        Ok(m)
    }
}

impl Accelerator for StatevectorAccelerator {
    fn name(&self) -> &str {
        "statevector"
    }

    fn initialize(&mut self, config: AcceleratorConfig) -> Result<(), BackendError> {
        config.validate()?;
        self.config = config;
        let rng = match config.seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s),
            None => ChaCha8Rng::from_os_rng(),
        };
        self.rng = Mutex::new(rng);
        Ok(())
    }

    fn config(&self) -> AcceleratorConfig {
        self.config
    }

    fn execute(
        &self,
        buffer: &mut AcceleratorBuffer,
        circuits: &[CompositeInstruction],
    ) -> Result<(), BackendError> {
        for c in circuits {
            if !c.is_concrete() {
                return Err(BackendError::Symbolic(c.name().to_string()));
            }
        }
        for c in circuits {
            let m = self.run_one(buffer.size, c)?;
            buffer.measurements.push(m);
        }
        Ok(())
    }

    fn statevector(&self, circuit: &CompositeInstruction, n: usize) -> Result<Vec<Complex64>, BackendError> {
        statevector(circuit, n)
    }
}

/// `<psi|obs|psi>` for the state prepared by `circuit`, estimated by
/// observing every term, executing the measured circuits and summing the
/// per-term estimates plus the identity offset.
pub fn expectation(
    obs: &PauliOperator,
    circuit: &CompositeInstruction,
    accelerator: &dyn Accelerator,
) -> Result<f64, BackendError> {
    let observed = observe(obs, circuit)?;
    if observed.terms.is_empty() {
        return Ok(observed.offset);
    }
    let n = obs.n_qubits().max(circuit.n_qubits()).max(1);
    let mut buffer = qalloc(n)?;
    let circuits: Vec<CompositeInstruction> = observed.terms.iter().map(|t| t.1.clone()).collect();
    accelerator.execute(&mut buffer, &circuits)?;
    let mut total = observed.offset;
    for ((term, _), m) in observed.terms.iter().zip(buffer.measurements()) {
        total += m.expectation(term)?;
    }
    Ok(total)
}
