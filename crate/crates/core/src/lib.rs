//! `qcx` is a backend-agnostic hybrid quantum-classical framework for
//! chemistry simulation.
//!
//! The crate is organised around a handful of service interfaces that are
//! looked up by name through the [`registry`]:
//!
//! * [`backend::Accelerator`] executes circuits on a qubit register
//!   ([`backend::AcceleratorBuffer`]). A noiseless statevector simulator is
//!   provided, in exact-expectation (`shots = 0`) and sampling modes.
//! * [`optim::Optimizer`] drives the classical outer loop; gradient
//!   strategies (finite differences, parameter shift) live next to it.
//! * [`algorithms::Algorithm`] implements VQE, ADAPT-VQE, QITE, QCMX and QEOM
//!   on top of the above.
//!
//! Circuits are expressed in the [`ir`] (an n-ary tree of gate instructions
//! with symbolic parameters), observables as [`pauli::PauliOperator`] sums,
//! and fermionic operators are mapped to qubits with the Jordan-Wigner
//! transform in [`fermion`].
//!
//! Conventions used throughout:
//!
//! * Qubit 0 is the leftmost character of every bitstring and the leftmost
//!   Kronecker factor of every dense matrix, so `X` on qubit 0 of a 2-qubit
//!   register prepares `|10>`.
//! * Rotations are `R_P(theta) = exp(-i theta P / 2)`.
//! * `|1>` marks an occupied spin-orbital; alpha spin-orbitals occupy the
//!   first half of the register and beta spin-orbitals the second half.

pub mod algorithms;
pub mod ansatz;
pub mod backend;
pub mod cli;
pub mod fermion;
pub mod ir;
pub mod linalg;
pub mod optim;
pub mod pauli;
pub mod registry;

pub use num_complex::Complex64;

pub use algorithms::{Algorithm, AlgorithmError, AlgorithmSpec};
pub use backend::{qalloc, Accelerator, AcceleratorBuffer, AcceleratorConfig};
pub use ir::{CompositeInstruction, Gate, Instruction, Parameter};
pub use pauli::{PauliOperator, PauliTerm};
pub use registry::{HeterogeneousMap, Registry, ServiceKind, Value};

/// Crate version, embedded in result-file provenance headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
