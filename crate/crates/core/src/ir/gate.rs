use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::IrError;

/// The closed gate set of the IR.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Rx,
    Ry,
    Rz,
    CNOT,
    CZ,
    Swap,
    Measure,
}

impl Gate {
    pub const ALL: [Gate; 15] = [
        Gate::I,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::H,
        Gate::S,
        Gate::Sdg,
        Gate::T,
        Gate::Rx,
        Gate::Ry,
        Gate::Rz,
        Gate::CNOT,
        Gate::CZ,
        Gate::Swap,
        Gate::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gate::I => "I",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::H => "H",
            Gate::S => "S",
            Gate::Sdg => "Sdg",
            Gate::T => "T",
            Gate::Rx => "Rx",
            Gate::Ry => "Ry",
            Gate::Rz => "Rz",
            Gate::CNOT => "CNOT",
            Gate::CZ => "CZ",
            Gate::Swap => "Swap",
            Gate::Measure => "Measure",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Gate::CNOT | Gate::CZ | Gate::Swap => 2,
            _ => 1,
        }
    }

    pub fn num_params(self) -> usize {
        if self.is_rotation() {
            1
        } else {
            0
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, Gate::Rx | Gate::Ry | Gate::Rz)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gate {
    type Err = IrError;

    fn from_str(s: &str) -> Result<Self, IrError> {
        Gate::ALL
            .iter()
            .copied()
            .find(|g| g.name() == s)
            .ok_or_else(|| IrError::UnknownGate(s.to_string()))
    }
}

/// A gate parameter: concrete radians or `coef * var`.
#[derive(Debug, Clone, PartialEq)]
pub enum Parameter {
    Concrete(f64),
    Symbolic { coef: f64, var: Arc<str> },
}

impl Parameter {
    /// The bare variable `var` (coefficient 1).
    pub fn var(name: &str) -> Self {
        Parameter::Symbolic {
            coef: 1.0,
            var: Arc::from(name),
        }
    }

    pub fn scaled(coef: f64, var: Arc<str>) -> Self {
        Parameter::Symbolic { coef, var }
    }

    pub fn variable(&self) -> Option<&str> {
        match self {
            Parameter::Symbolic { var, .. } => Some(var),
            Parameter::Concrete(_) => None,
        }
    }

    /// Multiplies the parameter by a real constant.
    pub fn times(&self, k: f64) -> Self {
        match self {
            Parameter::Concrete(v) => Parameter::Concrete(v * k),
            Parameter::Symbolic { coef, var } => Parameter::Symbolic {
                coef: coef * k,
                var: var.clone(),
            },
        }
    }

    pub fn evaluate(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, IrError> {
        match self {
            Parameter::Concrete(v) => Ok(*v),
            Parameter::Symbolic { coef, var } => lookup(var)
                .map(|x| coef * x)
                .ok_or_else(|| IrError::UnboundVariable(var.to_string())),
        }
    }
}

impl From<f64> for Parameter {
    fn from(v: f64) -> Self {
        Parameter::Concrete(v)
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parameter::Concrete(v) => write!(f, "{v}"),
            Parameter::Symbolic { coef, var } => {
                if *coef == 1.0 {
                    write!(f, "{var}")
                } else if *coef == -1.0 {
                    write!(f, "-{var}")
                } else {
                    write!(f, "{coef}*{var}")
                }
            }
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for Parameter {
    type Err = IrError;

    /// Accepts `1.5`, `t`, `-t`, `2*t`, `-0.5*t` and `t*2`.
    fn from_str(s: &str) -> Result<Self, IrError> {
        let bad = || IrError::BadExpression(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad());
        }
        if let Ok(v) = t.parse::<f64>() {
            if v.is_finite() && !t.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
                return Ok(Parameter::Concrete(v));
            }
        }
        let (sign, body) = match t.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, t.strip_prefix('+').unwrap_or(&t)),
        };
        let (coef, var) = match body.split_once('*') {
            None => (1.0, body),
            Some((a, b)) => {
                if is_identifier(b) {
                    (a.parse::<f64>().map_err(|_| bad())?, b)
                } else if is_identifier(a) {
                    (b.parse::<f64>().map_err(|_| bad())?, a)
                } else {
                    return Err(bad());
                }
            }
        };
        if !is_identifier(var) || !coef.is_finite() {
            return Err(bad());
        }
        Ok(Parameter::Symbolic {
            coef: sign * coef,
            var: Arc::from(var),
        })
    }
}
