//! Gradient strategies: finite differences and the parameter-shift rule.
//!
//! A strategy turns a parameterized circuit and a point `x` into a
//! [`GradientRequest`]: a list of concrete circuits plus a linear recipe
//! that combines one expectation value per circuit into `dE/dx`.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::ir::{CompositeInstruction, IrError, Parameter};
use crate::pauli::{observe, PauliError, PauliOperator};
use crate::registry::{HeterogeneousMap, MapError};

pub const GRADIENT_STRATEGIES: [&str; 4] = ["backward", "central", "forward", "parameter-shift"];

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GradientError {
    #[error("unknown gradient strategy `{name}`; available: {}", GRADIENT_STRATEGIES.join(", "))]
    UnknownStrategy { name: String },
    #[error("expected {expected} value(s), got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("variable `{0}` enters a non-rotation parameter; the parameter-shift rule does not apply")]
    NonRotationVariable(String),
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Options(#[from] MapError),
}

/// `gradient[param] += weight * expectation[circuit]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contribution {
    pub param: usize,
    pub circuit: usize,
    pub weight: f64,
}

/// Circuits to execute and how to reduce their expectations to a gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientRequest {
    pub circuits: Vec<CompositeInstruction>,
    pub combine: Vec<Contribution>,
    pub n_params: usize,
}

/// Reduces per-circuit expectations to the gradient.
pub fn compute_gradient(request: &GradientRequest, expectations: &[f64]) -> Result<Vec<f64>, GradientError> {
    if expectations.len() != request.circuits.len() {
        return Err(GradientError::LengthMismatch {
            expected: request.circuits.len(),
            found: expectations.len(),
        });
    }
    let mut g = vec![0.0; request.n_params];
    for c in &request.combine {
        g[c.param] += c.weight * expectations[c.circuit];
    }
    Ok(g)
}

pub trait GradientStrategy: Send + Sync {
    fn name(&self) -> &str;

    /// Reads strategy options; the default ignores them.
    fn configure(&mut self, options: &HeterogeneousMap) -> Result<(), GradientError> {
        let _ = options;
        Ok(())
    }

    /// Concrete, measurement-free circuits whose energies combine into the
    /// gradient at `x`.
    fn shifted_circuits(&self, circuit: &CompositeInstruction, x: &[f64]) -> Result<GradientRequest, GradientError>;

    /// [`shifted_circuits`](Self::shifted_circuits) with every state
    /// observed against `obs`: one measured circuit per (shifted state,
    /// non-identity term). The identity offset cancels because each
    /// parameter's weights sum to zero.
    fn gradient_executions(
        &self,
        circuit: &CompositeInstruction,
        x: &[f64],
        obs: &PauliOperator,
    ) -> Result<GradientRequest, GradientError> {
        let states = self.shifted_circuits(circuit, x)?;
        let mut circuits = Vec::new();
        let mut owners: Vec<Vec<usize>> = Vec::with_capacity(states.circuits.len());
        for s in &states.circuits {
            let observed = observe(obs, s)?;
            let start = circuits.len();
            circuits.extend(observed.terms.into_iter().map(|(_, c)| c));
            owners.push((start..circuits.len()).collect());
        }
        let combine = states
            .combine
            .iter()
            .flat_map(|c| {
                owners[c.circuit].iter().map(move |&k| Contribution {
                    param: c.param,
                    circuit: k,
                    weight: c.weight,
                })
            })
            .collect();
        Ok(GradientRequest {
            circuits,
            combine,
            n_params: states.n_params,
        })
    }
}

fn check_len(circuit: &CompositeInstruction, x: &[f64]) -> Result<(), GradientError> {
    if x.len() != circuit.n_variables() {
        return Err(GradientError::LengthMismatch {
            expected: circuit.n_variables(),
            found: x.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Difference {
    Central,
    Forward,
    Backward,
}

/// Finite differences with step `h` (option `step`, default 1e-4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifference {
    pub kind: Difference,
    pub step: f64,
}

impl FiniteDifference {
    pub fn new(kind: Difference) -> Self {
        FiniteDifference { kind, step: 1e-4 }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }
}

impl GradientStrategy for FiniteDifference {
    fn name(&self) -> &str {
        match self.kind {
            Difference::Central => "central",
            Difference::Forward => "forward",
            Difference::Backward => "backward",
        }
    }

    fn configure(&mut self, options: &HeterogeneousMap) -> Result<(), GradientError> {
        if let Some(h) = options.get_opt::<f64>("step")? {
            if !(h > 0.0 && h.is_finite()) {
                return Err(GradientError::BadStep(h));
            }
            self.step = h;
        }
        Ok(())
    }

    fn shifted_circuits(&self, circuit: &CompositeInstruction, x: &[f64]) -> Result<GradientRequest, GradientError> {
        check_len(circuit, x)?;
        let h = self.step;
        let mut circuits = Vec::new();
        let mut combine = Vec::new();
        let at = |xs: &[f64], circuits: &mut Vec<CompositeInstruction>| -> Result<usize, GradientError> {
            circuits.push(circuit.evaluate(xs)?);
            Ok(circuits.len() - 1)
        };
        let base = match self.kind {
            Difference::Central => None,
            _ => Some(at(x, &mut circuits)?),
        };
        for i in 0..x.len() {
            let mut xp = x.to_vec();
            match self.kind {
                Difference::Central => {
                    xp[i] = x[i] + h;
                    let p = at(&xp, &mut circuits)?;
                    xp[i] = x[i] - h;
                    let m = at(&xp, &mut circuits)?;
                    combine.push(Contribution { param: i, circuit: p, weight: 0.5 / h });
                    combine.push(Contribution { param: i, circuit: m, weight: -0.5 / h });
                }
                Difference::Forward => {
                    xp[i] = x[i] + h;
                    let p = at(&xp, &mut circuits)?;
                    combine.push(Contribution { param: i, circuit: p, weight: 1.0 / h });
                    combine.push(Contribution { param: i, circuit: base.unwrap(), weight: -1.0 / h });
                }
                Difference::Backward => {
                    xp[i] = x[i] - h;
                    let m = at(&xp, &mut circuits)?;
                    combine.push(Contribution { param: i, circuit: base.unwrap(), weight: 1.0 / h });
                    combine.push(Contribution { param: i, circuit: m, weight: -1.0 / h });
                }
            }
        }
        Ok(GradientRequest {
            circuits,
            combine,
            n_params: x.len(),
        })
    }
}

/// Parameter-shift rule for `R_P(theta) = exp(-i theta P / 2)` rotations.
///
/// A variable may appear in several rotations, each with angle `c * var`.
/// Every occurrence is shifted by `+-pi/2` on its own while the others stay
/// at `x`, and contributes `c * (E+ - E-) / 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParameterShift;

impl GradientStrategy for ParameterShift {
    fn name(&self) -> &str {
        "parameter-shift"
    }

    fn shifted_circuits(&self, circuit: &CompositeInstruction, x: &[f64]) -> Result<GradientRequest, GradientError> {
        check_len(circuit, x)?;
        let index: HashMap<&str, usize> = circuit
            .variables()
            .iter()
            .enumerate()
            .map(|(i, v)| (&**v, i))
            .collect();
        let lookup = |v: &str| index.get(v).map(|&i| x[i]);

        // Concrete instructions plus (position, variable, scale) for each
        // symbolic occurrence.
        let mut base = Vec::with_capacity(circuit.n_instructions());
        let mut occurrences = Vec::new();
        for inst in circuit.instructions() {
            match inst.parameter() {
                Some(p @ Parameter::Symbolic { coef, var }) => {
                    if !inst.gate().is_rotation() {
                        return Err(GradientError::NonRotationVariable(var.to_string()));
                    }
                    let v = p.evaluate(&lookup)?;
                    occurrences.push((base.len(), index[&**var], *coef));
                    base.push(inst.with_parameter(Parameter::Concrete(v)));
                }
                _ => base.push(inst.clone()),
            }
        }

        let build = |pos: usize, shift: f64| {
            let mut c = CompositeInstruction::new(circuit.name());
            for (k, inst) in base.iter().enumerate() {
                if k == pos {
                    let a = inst.angle().expect("concrete rotation");
                    c.add_instruction(inst.with_parameter(Parameter::Concrete(a + shift)));
                } else {
                    c.add_instruction(inst.clone());
                }
            }
            c
        };

        let mut circuits = Vec::with_capacity(2 * occurrences.len());
        let mut combine = Vec::with_capacity(2 * occurrences.len());
        for &(pos, param, coef) in &occurrences {
            circuits.push(build(pos, FRAC_PI_2));
            combine.push(Contribution { param, circuit: circuits.len() - 1, weight: 0.5 * coef });
            circuits.push(build(pos, -FRAC_PI_2));
            combine.push(Contribution { param, circuit: circuits.len() - 1, weight: -0.5 * coef });
        }
        Ok(GradientRequest {
            circuits,
            combine,
            n_params: x.len(),
        })
    }
}

/// Built-in strategy by name.
pub fn gradient_strategy(name: &str) -> Result<Box<dyn GradientStrategy>, GradientError> {
    Ok(match name {
        "central" => Box::new(FiniteDifference::new(Difference::Central)),
        "forward" => Box::new(FiniteDifference::new(Difference::Forward)),
        "backward" => Box::new(FiniteDifference::new(Difference::Backward)),
        "parameter-shift" => Box::new(ParameterShift),
        _ => return Err(GradientError::UnknownStrategy { name: name.to_string() }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{expectation, AcceleratorConfig, StatevectorAccelerator};
    use crate::ir::{Gate, Instruction};

    fn rx_circuit() -> CompositeInstruction {
        let mut c = CompositeInstruction::new("rx");
        c.add_instruction(Instruction::new(Gate::Rx, &[0], &[Parameter::var("theta")]).unwrap());
        c
    }

    fn gradient(strategy: &dyn GradientStrategy, theta: f64) -> f64 {
        let acc = StatevectorAccelerator::new(AcceleratorConfig::exact()).unwrap();
        let z = PauliOperator::term(1.0, "Z0");
        let req = strategy.gradient_executions(&rx_circuit(), &[theta], &z).unwrap();
        let unit = PauliOperator::term(1.0, "Z0");
        let e: Vec<f64> = req
            .circuits
            .iter()
            .map(|c| {
                // Strip the trailing measurement to evaluate exactly.
                let mut s = CompositeInstruction::new("s");
                for i in c.instructions().filter(|i| i.gate() != Gate::Measure) {
                    s.add_instruction(i.clone());
                }
                expectation(&unit, &s, &acc).unwrap()
            })
            .collect();
        compute_gradient(&req, &e).unwrap()[0]
    }

    #[test]
    fn circuit_counts() {
        let z = PauliOperator::term(1.0, "Z0");
        let central = gradient_strategy("central").unwrap();
        assert_eq!(central.gradient_executions(&rx_circuit(), &[0.1], &z).unwrap().circuits.len(), 2);
        let ps = gradient_strategy("parameter-shift").unwrap();
        let req = ps.gradient_executions(&rx_circuit(), &[0.1], &z).unwrap();
        assert_eq!(req.circuits.len(), 2);
        let angles: Vec<f64> = req.circuits.iter().map(|c| c.instructions().next().unwrap().angle().unwrap()).collect();
        assert!((angles[0] - (0.1 + FRAC_PI_2)).abs() < 1e-15);
        assert!((angles[1] - (0.1 - FRAC_PI_2)).abs() < 1e-15);
        assert!(matches!(gradient_strategy("adjoint"), Err(GradientError::UnknownStrategy { .. })));
    }

    #[test]
    fn parameter_shift_on_rx() {
        let ps = ParameterShift;
        assert!(gradient(&ps, 0.0).abs() < 1e-12);
        let t = std::f64::consts::FRAC_PI_3;
        assert!((gradient(&ps, t) + t.sin()).abs() < 1e-10);
        let fd = FiniteDifference::new(Difference::Central).with_step(1e-5);
        assert!((gradient(&fd, t) + t.sin()).abs() < 1e-8);
        for kind in [Difference::Forward, Difference::Backward] {
            assert!((gradient(&FiniteDifference::new(kind), t) + t.sin()).abs() < 1e-4);
        }
    }

    #[test]
    fn length_mismatch() {
        let req = ParameterShift.shifted_circuits(&rx_circuit(), &[0.0]).unwrap();
        assert_eq!(
            compute_gradient(&req, &[1.0]),
            Err(GradientError::LengthMismatch { expected: 2, found: 1 })
        );
        assert!(ParameterShift.shifted_circuits(&rx_circuit(), &[]).is_err());
    }

    #[test]
    fn repeated_variable_uses_every_occurrence() {
        // Rx(t) Rx(-2t) = Rx(-t): <Z> = cos t, gradient -sin t.
        let mut c = CompositeInstruction::new("r");
        c.add_instruction(Instruction::new(Gate::Rx, &[0], &[Parameter::var("t")]).unwrap());
        c.add_instruction(Instruction::new(Gate::Rx, &[0], &[Parameter::scaled(-2.0, "t".into())]).unwrap());
        let acc = StatevectorAccelerator::new(AcceleratorConfig::exact()).unwrap();
        let z = PauliOperator::term(1.0, "Z0");
        let req = ParameterShift.shifted_circuits(&c, &[0.4]).unwrap();
        assert_eq!(req.circuits.len(), 4);
        let e: Vec<f64> = req.circuits.iter().map(|s| expectation(&z, s, &acc).unwrap()).collect();
        let g = compute_gradient(&req, &e).unwrap()[0];
        assert!((g + 0.4f64.sin()).abs() < 1e-12);
    }
}
