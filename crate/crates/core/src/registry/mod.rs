//! In-process service registry: `(kind, name)` to factory lookup, plus the
//! [`HeterogeneousMap`] used for option plumbing.
//!
//! Every lookup builds a fresh instance from the registered factory. The
//! process-wide [`global`] registry is populated once with the built-in
//! services and is read-only afterwards.

mod hetmap;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::algorithms::{self, Algorithm};
use crate::ansatz::{self, CircuitGenerator, PoolGenerator};
use crate::backend::{Accelerator, StatevectorAccelerator};
use crate::fermion::{JordanWignerTransform, ObservableTransform};
use crate::ir::{Compiler, KernelCompiler};
use crate::optim::{self, GradientStrategy, Optimizer};

pub use hetmap::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ServiceKind {
    Accelerator,
    Optimizer,
    Algorithm,
    Compiler,
    CircuitGenerator,
    ObservableTransform,
    GradientStrategy,
    OperatorPool,
}

impl ServiceKind {
    pub const ALL: [ServiceKind; 8] = [
        ServiceKind::Accelerator,
        ServiceKind::Optimizer,
        ServiceKind::Algorithm,
        ServiceKind::Compiler,
        ServiceKind::CircuitGenerator,
        ServiceKind::ObservableTransform,
        ServiceKind::GradientStrategy,
        ServiceKind::OperatorPool,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ServiceKind::Accelerator => "accelerator",
            ServiceKind::Optimizer => "optimizer",
            ServiceKind::Algorithm => "algorithm",
            ServiceKind::Compiler => "compiler",
            ServiceKind::CircuitGenerator => "circuit-generator",
            ServiceKind::ObservableTransform => "observable-transform",
            ServiceKind::GradientStrategy => "gradient-strategy",
            ServiceKind::OperatorPool => "operator-pool",
        }
    }
}

impl fmt::Display for ServiceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A freshly constructed service instance.
pub enum Service {
    Accelerator(Box<dyn Accelerator>),
    Optimizer(Box<dyn Optimizer>),
    Algorithm(Box<dyn Algorithm>),
    Compiler(Box<dyn Compiler>),
    CircuitGenerator(Box<dyn CircuitGenerator>),
    ObservableTransform(Box<dyn ObservableTransform>),
    GradientStrategy(Box<dyn GradientStrategy>),
    OperatorPool(Box<dyn PoolGenerator>),
}

impl Service {
    pub fn kind(&self) -> ServiceKind {
        match self {
            Service::Accelerator(_) => ServiceKind::Accelerator,
            Service::Optimizer(_) => ServiceKind::Optimizer,
            Service::Algorithm(_) => ServiceKind::Algorithm,
            Service::Compiler(_) => ServiceKind::Compiler,
            Service::CircuitGenerator(_) => ServiceKind::CircuitGenerator,
            Service::ObservableTransform(_) => ServiceKind::ObservableTransform,
            Service::GradientStrategy(_) => ServiceKind::GradientStrategy,
            Service::OperatorPool(_) => ServiceKind::OperatorPool,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Service::Accelerator(s) => s.name(),
            Service::Optimizer(s) => s.name(),
            Service::Algorithm(s) => s.name(),
            Service::Compiler(s) => s.name(),
            Service::CircuitGenerator(s) => s.name(),
            Service::ObservableTransform(s) => s.name(),
            Service::GradientStrategy(s) => s.name(),
            Service::OperatorPool(s) => s.name(),
        }
    }
}

impl fmt::Debug for Service {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Service({}, {})", self.kind(), self.name())
    }
}

pub type Factory = Arc<dyn Fn() -> Service + Send + Sync>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("service name must be non-empty")]
    EmptyName,
    #[error("{kind} `{name}` is already registered")]
    DuplicateService { kind: ServiceKind, name: String },
    #[error("no {kind} named `{name}`; available: {}", if available.is_empty() { "(none)".to_string() } else { available.join(", ") })]
    ServiceNotFound {
        kind: ServiceKind,
        name: String,
        available: Vec<String>,
    },
    #[error("factory registered as {expected} `{name}` produced a {found} named `{found_name}`")]
    FactoryMismatch {
        expected: ServiceKind,
        name: String,
        found: ServiceKind,
        found_name: String,
    },
}

/// Name-to-factory table, one namespace per [`ServiceKind`].
#[derive(Default, Clone)]
pub struct Registry {
    services: BTreeMap<(ServiceKind, String), Factory>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.services.keys()).finish()
    }
}

macro_rules! typed_getter {
    ($fn:ident, $variant:ident, $trait:ident) => {
        pub fn $fn(&self, name: &str) -> Result<Box<dyn $trait>, RegistryError> {
            match self.get_service(ServiceKind::$variant, name)? {
                Service::$variant(s) => Ok(s),
                _ => unreachable!("kind checked at registration"),
            }
        }
    };
}

impl Registry {
    /// An empty registry.
    pub fn new() -> Self {
        Self::default()
    }

    /// A registry holding every built-in service.
    pub fn with_defaults() -> Self {
        let mut r = Registry::new();
        register_defaults(&mut r).expect("built-in services register cleanly");
        r
    }

    /// Registers `factory` under `(kind, name)`. The factory is invoked once
    /// to check that it produces a service of the declared kind and name.
    pub fn register_service<F>(&mut self, kind: ServiceKind, name: &str, factory: F) -> Result<(), RegistryError>
    where
        F: Fn() -> Service + Send + Sync + 'static,
    {
        if name.is_empty() {
            return Err(RegistryError::EmptyName);
        }
        let key = (kind, name.to_string());
        if self.services.contains_key(&key) {
            return Err(RegistryError::DuplicateService {
                kind,
                name: name.to_string(),
            });
        }
        let probe = factory();
        if probe.kind() != kind || probe.name() != name {
            return Err(RegistryError::FactoryMismatch {
                expected: kind,
                name: name.to_string(),
                found: probe.kind(),
                found_name: probe.name().to_string(),
            });
        }
        self.services.insert(key, Arc::new(factory));
        Ok(())
    }

    pub fn contains(&self, kind: ServiceKind, name: &str) -> bool {
        self.services.contains_key(&(kind, name.to_string()))
    }

    /// A new instance of the named service.
    pub fn get_service(&self, kind: ServiceKind, name: &str) -> Result<Service, RegistryError> {
        match self.services.get(&(kind, name.to_string())) {
            Some(f) => Ok(f()),
            None => Err(RegistryError::ServiceNotFound {
                kind,
                name: name.to_string(),
                available: self.list_services(kind),
            }),
        }
    }

    /// Sorted names registered for `kind`.
    pub fn list_services(&self, kind: ServiceKind) -> Vec<String> {
        self.services
            .keys()
            .filter(|(k, _)| *k == kind)
            .map(|(_, n)| n.clone())
            .collect()
    }

    typed_getter!(get_accelerator, Accelerator, Accelerator);
    typed_getter!(get_optimizer, Optimizer, Optimizer);
    typed_getter!(get_algorithm, Algorithm, Algorithm);
    typed_getter!(get_compiler, Compiler, Compiler);
    typed_getter!(get_circuit_generator, CircuitGenerator, CircuitGenerator);
    typed_getter!(get_observable_transform, ObservableTransform, ObservableTransform);
    typed_getter!(get_gradient_strategy, GradientStrategy, GradientStrategy);
    typed_getter!(get_operator_pool, OperatorPool, PoolGenerator);
}

fn register_defaults(r: &mut Registry) -> Result<(), RegistryError> {
    use ServiceKind as K;
    r.register_service(K::Accelerator, "statevector", || {
        Service::Accelerator(Box::new(StatevectorAccelerator::default()))
    })?;
    r.register_service(K::Optimizer, "nelder-mead", || {
        Service::Optimizer(Box::new(optim::NelderMead::default()))
    })?;
    r.register_service(K::Optimizer, "gradient-descent", || {
        Service::Optimizer(Box::new(optim::GradientDescent::default()))
    })?;
    r.register_service(K::Algorithm, "vqe", || Service::Algorithm(Box::new(algorithms::Vqe::default())))?;
    r.register_service(K::Algorithm, "adapt", || Service::Algorithm(Box::new(algorithms::Adapt::default())))?;
    r.register_service(K::Algorithm, "qite", || Service::Algorithm(Box::new(algorithms::Qite::default())))?;
    r.register_service(K::Algorithm, "qcmx", || Service::Algorithm(Box::new(algorithms::Qcmx::default())))?;
    r.register_service(K::Algorithm, "qeom", || Service::Algorithm(Box::new(algorithms::Qeom::default())))?;
    r.register_service(K::Compiler, "kernel", || Service::Compiler(Box::new(KernelCompiler)))?;
    r.register_service(K::CircuitGenerator, "hf", || {
        Service::CircuitGenerator(Box::new(ansatz::HartreeFockGenerator))
    })?;
    r.register_service(K::CircuitGenerator, "uccsd", || {
        Service::CircuitGenerator(Box::new(ansatz::UccsdGenerator))
    })?;
    r.register_service(K::CircuitGenerator, "exp_pauli", || {
        Service::CircuitGenerator(Box::new(ansatz::ExpPauliGenerator))
    })?;
    r.register_service(K::ObservableTransform, "jw", || {
        Service::ObservableTransform(Box::new(JordanWignerTransform))
    })?;
    for name in ansatz::POOL_NAMES {
        r.register_service(K::OperatorPool, name, move || {
            Service::OperatorPool(Box::new(ansatz::NamedPool(name)))
        })?;
    }
    for name in optim::GRADIENT_STRATEGIES {
        r.register_service(K::GradientStrategy, name, move || {
            Service::GradientStrategy(optim::gradient_strategy(name).expect("known strategy"))
        })?;
    }
    Ok(())
}

/// The process-wide registry of built-in services.
pub fn global() -> &'static Registry {
    static GLOBAL: OnceLock<Registry> = OnceLock::new();
    GLOBAL.get_or_init(Registry::with_defaults)
}

/// [`Registry::get_service`] on the global registry.
pub fn get_service(kind: ServiceKind, name: &str) -> Result<Service, RegistryError> {
    global().get_service(kind, name)
}

/// [`Registry::list_services`] on the global registry.
pub fn list_services(kind: ServiceKind) -> Vec<String> {
    global().list_services(kind)
}

pub fn get_accelerator(name: &str) -> Result<Box<dyn Accelerator>, RegistryError> {
    global().get_accelerator(name)
}

pub fn get_optimizer(name: &str) -> Result<Box<dyn Optimizer>, RegistryError> {
    global().get_optimizer(name)
}

pub fn get_algorithm(name: &str) -> Result<Box<dyn Algorithm>, RegistryError> {
    global().get_algorithm(name)
}

pub fn get_gradient_strategy(name: &str) -> Result<Box<dyn GradientStrategy>, RegistryError> {
    global().get_gradient_strategy(name)
}
