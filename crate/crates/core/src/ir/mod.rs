//! Circuit intermediate representation.
//!
//! A [`CompositeInstruction`] is an n-ary tree whose leaves are gate
//! [`Instruction`]s. Rotation angles are [`Parameter`]s: either concrete
//! radians or a linear form `c*var` over a named variable, bound later with
//! [`CompositeInstruction::evaluate`].

mod gate;
mod matrix;
mod parser;
mod printer;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use gate::{Gate, Parameter};
pub use matrix::gate_matrix;
pub use parser::{parse_kernel, ParseError, ParseErrorKind};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IrError {
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("gate {gate} acts on {expected} qubit(s), got {found}")]
    Arity {
        gate: Gate,
        expected: usize,
        found: usize,
    },
    #[error("gate {gate} takes {expected} parameter(s), got {found}")]
    ParamCount {
        gate: Gate,
        expected: usize,
        found: usize,
    },
    #[error("gate {gate} repeats qubit {qubit}")]
    DuplicateQubit { gate: Gate, qubit: usize },
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("expected {expected} variable value(s), got {found}; {detail}")]
    ValueCount {
        expected: usize,
        found: usize,
        detail: String,
    },
    #[error("operation requires a concrete circuit but `{0}` is symbolic")]
    Symbolic(String),
    #[error("{0} has no unitary matrix")]
    NoMatrix(Gate),
    #[error("invalid parameter expression `{0}`")]
    BadExpression(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Source-to-IR front end.
pub trait Compiler: Send + Sync {
    fn name(&self) -> &str;
    fn compile(&self, source: &str) -> Result<CompositeInstruction, IrError>;
}

/// Compiler for the `__qpu__` kernel dialect, see [`parse_kernel`].
#[derive(Debug, Clone, Copy, Default)]
pub struct KernelCompiler;

impl Compiler for KernelCompiler {
    fn name(&self) -> &str {
        "kernel"
    }
    fn compile(&self, source: &str) -> Result<CompositeInstruction, IrError> {
        Ok(parse_kernel(source)?)
    }
}

/// A single gate application.
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    gate: Gate,
    qubits: [usize; 2],
    param: Option<Parameter>,
}

impl Instruction {
    /// Validated constructor: arity, parameter count and distinct qubits.
    pub fn new(gate: Gate, qubits: &[usize], params: &[Parameter]) -> Result<Self, IrError> {
        if qubits.len() != gate.arity() {
            return Err(IrError::Arity {
                gate,
                expected: gate.arity(),
                found: qubits.len(),
            });
        }
        if params.len() != gate.num_params() {
            return Err(IrError::ParamCount {
                gate,
                expected: gate.num_params(),
                found: params.len(),
            });
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(IrError::DuplicateQubit {
                gate,
                qubit: qubits[0],
            });
        }
        let mut q = [0; 2];
        q[..qubits.len()].copy_from_slice(qubits);
        Ok(Instruction {
            gate,
            qubits: q,
            param: params.first().cloned(),
        })
    }

    /// Factory taking the gate by name, mirroring the IR provider lookup.
    pub fn create(name: &str, qubits: &[usize], params: &[Parameter]) -> Result<Self, IrError> {
        let gate: Gate = name.parse()?;
        Self::new(gate, qubits, params)
    }

    pub(crate) fn one(gate: Gate, q: usize) -> Self {
        debug_assert!(gate.arity() == 1 && gate.num_params() == 0);
        Instruction {
            gate,
            qubits: [q, 0],
            param: None,
        }
    }

    pub(crate) fn two(gate: Gate, a: usize, b: usize) -> Self {
        debug_assert!(gate.arity() == 2 && a != b);
        Instruction {
            gate,
            qubits: [a, b],
            param: None,
        }
    }

    pub(crate) fn rotation(gate: Gate, q: usize, p: Parameter) -> Self {
        debug_assert!(gate.num_params() == 1);
        Instruction {
            gate,
            qubits: [q, 0],
            param: Some(p),
        }
    }

    pub fn gate(&self) -> Gate {
        self.gate
    }

    pub fn name(&self) -> &'static str {
        self.gate.name()
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.gate.arity()]
    }

    pub fn parameter(&self) -> Option<&Parameter> {
        self.param.as_ref()
    }

    pub fn is_concrete(&self) -> bool {
        !matches!(self.param, Some(Parameter::Symbolic { .. }))
    }

    /// Concrete angle, if the instruction has one.
    pub fn angle(&self) -> Option<f64> {
        match self.param {
            Some(Parameter::Concrete(v)) => Some(v),
            _ => None,
        }
    }

    pub fn with_parameter(&self, p: Parameter) -> Self {
        let mut out = self.clone();
        if out.param.is_some() {
            out.param = Some(p);
        }
        out
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gate)?;
        for (i, q) in self.qubits().iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}q[{q}]")?;
        }
        if let Some(p) = &self.param {
            write!(f, ", {p}")?;
        }
        Ok(())
    }
}

/// Child of a composite: either a leaf gate or a nested composite.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Instruction(Instruction),
    Composite(Box<CompositeInstruction>),
}

/// Named n-ary tree of instructions with an ordered list of free variables.
#[derive(Debug, Clone, Default)]
pub struct CompositeInstruction {
    name: String,
    children: Vec<Node>,
    variables: Vec<Arc<str>>,
    known: HashSet<Arc<str>>,
}

impl PartialEq for CompositeInstruction {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.variables == other.variables
            && self.children == other.children
    }
}

impl CompositeInstruction {
    pub fn new(name: impl Into<String>) -> Self {
        CompositeInstruction {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn children(&self) -> &[Node] {
        &self.children
    }

    /// Free variables in declaration / first-appearance order.
    pub fn variables(&self) -> &[Arc<str>] {
        &self.variables
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    /// Declares a variable without using it. No-op if already known.
    pub fn add_variable(&mut self, name: &str) -> Arc<str> {
        if let Some(v) = self.known.get(name) {
            return v.clone();
        }
        let v: Arc<str> = Arc::from(name);
        self.known.insert(v.clone());
        self.variables.push(v.clone());
        v
    }

    fn note_parameter(&mut self, p: &Parameter) {
        if let Parameter::Symbolic { var, .. } = p {
            if !self.known.contains(var) {
                self.known.insert(var.clone());
                self.variables.push(var.clone());
            }
        }
    }

    pub fn add_instruction(&mut self, inst: Instruction) {
        if let Some(p) = &inst.param {
            let p = p.clone();
            self.note_parameter(&p);
        }
        self.children.push(Node::Instruction(inst));
    }

    pub fn add_composite(&mut self, c: CompositeInstruction) {
        for v in c.variables.clone() {
            self.add_variable(&v);
        }
        self.children.push(Node::Composite(Box::new(c)));
    }

    /// Appends every instruction of `other` (flattened) to this composite.
    pub fn append(&mut self, other: &CompositeInstruction) {
        for v in &other.variables {
            self.add_variable(v);
        }
        self.children.reserve(other.n_instructions());
        for inst in other.instructions() {
            self.children.push(Node::Instruction(inst.clone()));
        }
    }

    /// Depth-first iterator over the leaf instructions.
    pub fn instructions(&self) -> Instructions<'_> {
        Instructions {
            stack: vec![self.children.iter()],
        }
    }

    pub fn n_instructions(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                Node::Instruction(_) => 1,
                Node::Composite(c) => c.n_instructions(),
            })
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.n_instructions() == 0
    }

    pub fn is_concrete(&self) -> bool {
        self.instructions().all(Instruction::is_concrete)
    }

    pub fn has_measurements(&self) -> bool {
        self.instructions().any(|i| i.gate == Gate::Measure)
    }

    /// Number of qubits touched, i.e. the largest index plus one.
    pub fn n_qubits(&self) -> usize {
        self.instructions()
            .flat_map(|i| i.qubits().iter().copied())
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Copy with the same tree shape and all leaves flattened into one level.
    pub fn flatten(&self) -> CompositeInstruction {
        let mut out = CompositeInstruction::new(self.name.clone());
        out.append(self);
        out
    }

    /// Binds `values` to the variables (in order) and returns a concrete
    /// deep copy.
    pub fn evaluate(&self, values: &[f64]) -> Result<CompositeInstruction, IrError> {
        if values.len() != self.variables.len() {
            let detail = if values.len() < self.variables.len() {
                let missing: Vec<&str> = self.variables[values.len()..]
                    .iter()
                    .map(|v| &**v)
                    .collect();
                format!("missing values for {}", missing.join(", "))
            } else {
                format!("{} extra value(s)", values.len() - self.variables.len())
            };
            return Err(IrError::ValueCount {
                expected: self.variables.len(),
                found: values.len(),
                detail,
            });
        }
        let lookup = |name: &str| {
            self.variables
                .iter()
                .position(|v| &**v == name)
                .map(|i| values[i])
        };
        if self.variables.len() > 16 {
            let table: std::collections::HashMap<&str, f64> = self
                .variables
                .iter()
                .map(|v| &**v)
                .zip(values.iter().copied())
                .collect();
            self.bind(&|name: &str| table.get(name).copied())
        } else {
            self.bind(&lookup)
        }
    }

    /// Binds variables through an arbitrary lookup. Variables the lookup
    /// does not know are an error.
    pub fn bind(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<CompositeInstruction, IrError> {
        let mut out = CompositeInstruction::new(self.name.clone());
        out.children.reserve(self.children.len());
        for c in &self.children {
            let node = match c {
                Node::Instruction(inst) => Node::Instruction(match &inst.param {
                    Some(p @ Parameter::Symbolic { .. }) => {
                        inst.with_parameter(Parameter::Concrete(p.evaluate(lookup)?))
                    }
                    _ => inst.clone(),
                }),
                Node::Composite(sub) => Node::Composite(Box::new(sub.bind(lookup)?)),
            };
            out.children.push(node);
        }
        Ok(out)
    }

    /// Longest chain of instructions sharing qubits (ASAP layering).
    pub fn depth(&self) -> Result<usize, IrError> {
        let mut layer: Vec<usize> = Vec::new();
        let mut depth = 0;
        for inst in self.instructions() {
            if !inst.is_concrete() {
                return Err(IrError::Symbolic(self.name.clone()));
            }
            let qs = inst.qubits();
            if let Some(&m) = qs.iter().max() {
                if layer.len() <= m {
                    layer.resize(m + 1, 0);
                }
            }
            let d = qs.iter().map(|&q| layer[q]).max().unwrap_or(0) + 1;
            for &q in qs {
                layer[q] = d;
            }
            depth = depth.max(d);
        }
        Ok(depth)
    }

    /// Gate name to number of occurrences.
    pub fn count_gates(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for inst in self.instructions() {
            *counts.entry(inst.name().to_string()).or_insert(0) += 1;
        }
        counts
    }

    /// Serializes to the stable text form read back by [`parse_kernel`].
    pub fn pretty_print(&self) -> String {
        printer::pretty_print(self)
    }
}

impl fmt::Display for CompositeInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty_print())
    }
}

/// Iterator returned by [`CompositeInstruction::instructions`].
pub struct Instructions<'a> {
    stack: Vec<std::slice::Iter<'a, Node>>,
}

impl<'a> Iterator for Instructions<'a> {
    type Item = &'a Instruction;

    fn next(&mut self) -> Option<&'a Instruction> {
        loop {
            let top = self.stack.last_mut()?;
            match top.next() {
                None => {
                    self.stack.pop();
                }
                Some(Node::Instruction(i)) => return Some(i),
                Some(Node::Composite(c)) => self.stack.push(c.children.iter()),
            }
        }
    }
}
