//! String-keyed map of mixed-type values used for all option plumbing.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::backend::Accelerator;
use crate::ir::CompositeInstruction;
use crate::optim::Optimizer;
use crate::pauli::PauliOperator;

/// One value stored in a [`HeterogeneousMap`]. The set of kinds is closed.
#[derive(Clone)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    IntList(Vec<i64>),
    RealList(Vec<f64>),
    StrList(Vec<String>),
    Observable(Arc<PauliOperator>),
    Composite(Arc<CompositeInstruction>),
    Optimizer(Arc<dyn Optimizer>),
    Accelerator(Arc<dyn Accelerator>),
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Bool(_) => ValueKind::Bool,
            Value::Int(_) => ValueKind::Int,
            Value::Real(_) => ValueKind::Real,
            Value::Str(_) => ValueKind::Str,
            Value::IntList(_) => ValueKind::IntList,
            Value::RealList(_) => ValueKind::RealList,
            Value::StrList(_) => ValueKind::StrList,
            Value::Observable(_) => ValueKind::Observable,
            Value::Composite(_) => ValueKind::Composite,
            Value::Optimizer(_) => ValueKind::Optimizer,
            Value::Accelerator(_) => ValueKind::Accelerator,
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "Bool({b})"),
            Value::Int(i) => write!(f, "Int({i})"),
            Value::Real(x) => write!(f, "Real({x})"),
            Value::Str(s) => write!(f, "Str({s:?})"),
            Value::IntList(v) => write!(f, "IntList({v:?})"),
            Value::RealList(v) => write!(f, "RealList({v:?})"),
            Value::StrList(v) => write!(f, "StrList({v:?})"),
            Value::Observable(o) => write!(f, "Observable({} terms)", o.len()),
            Value::Composite(c) => write!(f, "Composite({})", c.name()),
            Value::Optimizer(o) => write!(f, "Optimizer({})", o.name()),
            Value::Accelerator(a) => write!(f, "Accelerator({})", a.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Bool,
    Int,
    Real,
    Str,
    IntList,
    RealList,
    StrList,
    Observable,
    Composite,
    Optimizer,
    Accelerator,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValueKind::Bool => "boolean",
            ValueKind::Int => "integer",
            ValueKind::Real => "real",
            ValueKind::Str => "string",
            ValueKind::IntList => "list of integers",
            ValueKind::RealList => "list of reals",
            ValueKind::StrList => "list of strings",
            ValueKind::Observable => "observable",
            ValueKind::Composite => "composite instruction",
            ValueKind::Optimizer => "optimizer",
            ValueKind::Accelerator => "accelerator",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("key `{key}` holds a {found} but a {expected} was requested")]
    TypeMismatch {
        key: String,
        expected: ValueKind,
        found: ValueKind,
    },
}

/// Types that can be read out of a [`Value`] without coercion.
pub trait FromValue: Sized {
    const KIND: ValueKind;
    fn from_value(v: &Value) -> Option<Self>;
}

macro_rules! from_value {
    ($ty:ty, $kind:ident, $pat:pat => $out:expr) => {
        impl FromValue for $ty {
            const KIND: ValueKind = ValueKind::$kind;
            fn from_value(v: &Value) -> Option<Self> {
                match v {
                    $pat => Some($out),
                    _ => None,
                }
            }
        }
    };
}

from_value!(bool, Bool, Value::Bool(b) => *b);
from_value!(i64, Int, Value::Int(i) => *i);
from_value!(f64, Real, Value::Real(x) => *x);
from_value!(String, Str, Value::Str(s) => s.clone());
from_value!(Vec<i64>, IntList, Value::IntList(v) => v.clone());
from_value!(Vec<f64>, RealList, Value::RealList(v) => v.clone());
from_value!(Vec<String>, StrList, Value::StrList(v) => v.clone());
from_value!(Arc<PauliOperator>, Observable, Value::Observable(o) => o.clone());
from_value!(Arc<CompositeInstruction>, Composite, Value::Composite(c) => c.clone());
from_value!(Arc<dyn Optimizer>, Optimizer, Value::Optimizer(o) => o.clone());
from_value!(Arc<dyn Accelerator>, Accelerator, Value::Accelerator(a) => a.clone());

macro_rules! into_value {
    ($ty:ty, $variant:ident) => {
        impl From<$ty> for Value {
            fn from(v: $ty) -> Self {
                Value::$variant(v)
            }
        }
    };
}

into_value!(bool, Bool);
into_value!(i64, Int);
into_value!(f64, Real);
into_value!(String, Str);
into_value!(Vec<i64>, IntList);
into_value!(Vec<f64>, RealList);
into_value!(Vec<String>, StrList);
into_value!(Arc<PauliOperator>, Observable);
into_value!(Arc<CompositeInstruction>, Composite);
into_value!(Arc<dyn Optimizer>, Optimizer);
into_value!(Arc<dyn Accelerator>, Accelerator);

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<i32> for Value {
    fn from(i: i32) -> Self {
        Value::Int(i as i64)
    }
}

impl From<PauliOperator> for Value {
    fn from(o: PauliOperator) -> Self {
        Value::Observable(Arc::new(o))
    }
}

impl From<CompositeInstruction> for Value {
    fn from(c: CompositeInstruction) -> Self {
        Value::Composite(Arc::new(c))
    }
}

/// Ordered map from option name to [`Value`].
#[derive(Clone, Default, Debug)]
pub struct HeterogeneousMap {
    entries: BTreeMap<String, Value>,
}

impl HeterogeneousMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `value` under `key`, replacing any previous value.
    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<Value>) -> Option<Value> {
        self.entries.insert(key.into(), value.into())
    }

    /// Builder-style insert.
    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.insert(key, value);
        self
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn remove(&mut self, key: &str) -> Option<Value> {
        self.entries.remove(key)
    }

    /// Typed lookup. A value of the wrong kind is an error, never coerced.
    pub fn get<T: FromValue>(&self, key: &str) -> Result<T, MapError> {
        let v = self
            .entries
            .get(key)
            .ok_or_else(|| MapError::MissingKey(key.to_string()))?;
        T::from_value(v).ok_or_else(|| MapError::TypeMismatch {
            key: key.to_string(),
            expected: T::KIND,
            found: v.kind(),
        })
    }

    /// Typed lookup of an optional key: absent keys yield `None`, present
    /// keys of the wrong kind are still an error.
    pub fn get_opt<T: FromValue>(&self, key: &str) -> Result<Option<T>, MapError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(_) => self.get(key).map(Some),
        }
    }

    pub fn get_or<T: FromValue>(&self, key: &str, default: T) -> Result<T, MapError> {
        Ok(self.get_opt(key)?.unwrap_or(default))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_replaces_existing_key() {
        let mut m = HeterogeneousMap::new();
        m.insert("steps", 10i64);
        m.insert("steps", 20i64);
        assert_eq!(m.get::<i64>("steps").unwrap(), 20);
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let m = HeterogeneousMap::new().with("step-size", 1i64);
        let err = m.get::<f64>("step-size").unwrap_err();
        assert_eq!(
            err,
            MapError::TypeMismatch {
                key: "step-size".into(),
                expected: ValueKind::Real,
                found: ValueKind::Int,
            }
        );
    }

    #[test]
    fn missing_and_optional_keys() {
        let m = HeterogeneousMap::new().with("pool", "uccsd");
        assert!(matches!(m.get::<String>("x"), Err(MapError::MissingKey(_))));
        assert_eq!(m.get_opt::<String>("x").unwrap(), None);
        assert_eq!(m.get_or("x", 3i64).unwrap(), 3);
        assert!(m.get_opt::<i64>("pool").is_err());
    }
}
