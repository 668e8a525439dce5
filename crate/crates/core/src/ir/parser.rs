//! Parser for the two accepted kernel source forms.
//!
//! The C-like form:
//!
//! ```text
//! __qpu__ void ansatz(qbit q, double t0) {
//!   X(q[0]);
//!   Ry(q[1], -0.5*t0);   // comments run to end of line
//!   CNOT(q[1], q[0]);
//! }
//! ```
//!
//! and the line-oriented form written by
//! [`CompositeInstruction::pretty_print`](super::CompositeInstruction::pretty_print):
//!
//! ```text
//! kernel ansatz(t0)
//! X q[0]
//! Ry q[1], -0.5*t0
//! CNOT q[1], q[0]
//! ```

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{CompositeInstruction, Gate, Instruction, Parameter};

/// A parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    UnknownGate(String),
    UndeclaredVariable(String),
    DuplicateVariable(String),
    RegisterMismatch { declared: String, found: String },
    InvalidInstruction(String),
    InvalidCharacter(char),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnknownGate(g) => write!(f, "unknown gate `{g}`"),
            ParseErrorKind::UndeclaredVariable(v) => write!(f, "undeclared variable `{v}`"),
            ParseErrorKind::DuplicateVariable(v) => write!(f, "variable `{v}` declared twice"),
            ParseErrorKind::RegisterMismatch { declared, found } => {
                write!(f, "register `{found}` used but `{declared}` was declared")
            }
            ParseErrorKind::InvalidInstruction(msg) => write!(f, "{msg}"),
            ParseErrorKind::InvalidCharacter(c) => write!(f, "invalid character {c:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Punct(char),
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let ch = chars[i];
        let start = (line, col);
        let push = |out: &mut Vec<Token>, tok: Tok| {
            out.push(Token {
                tok,
                line: start.0,
                column: start.1,
            })
        };
        if ch == '\n' {
            push(&mut out, Tok::Newline);
            i += 1;
            line += 1;
            col = 1;
        } else if ch.is_whitespace() {
            i += 1;
            col += 1;
        } else if ch == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if ch == '#' && out.iter().all(|t| t.tok == Tok::Newline) {
            // Leading `#` comment lines are allowed before the header.
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let s = i;
            while i < chars.len() {
                let c = chars[i];
                let inner_punct = (c == '-' || c == '.')
                    && chars
                        .get(i + 1)
                        .is_some_and(|n| n.is_ascii_alphanumeric() || *n == '_');
                if c.is_ascii_alphanumeric() || c == '_' || inner_punct {
                    i += 1;
                } else {
                    break;
                }
            }
            let text: String = chars[s..i].iter().collect();
            col += i - s;
            push(&mut out, Tok::Ident(text));
        } else if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[s..i].iter().collect();
            col += i - s;
            push(&mut out, Tok::Number(text));
        } else if "(){}[],;*-+".contains(ch) {
            push(&mut out, Tok::Punct(ch));
            i += 1;
            col += 1;
        } else {
            return Err(ParseError {
                line,
                column: col,
                kind: ParseErrorKind::InvalidCharacter(ch),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Newlines are significant only in the line-oriented form.
    line_mode: bool,
}

impl Parser {
    fn skip_newlines(&mut self) {
        while self.toks[self.pos].tok == Tok::Newline {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> &Token {
        if !self.line_mode {
            self.skip_newlines();
        }
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: t.line,
            column: t.column,
            kind,
        }
    }

    fn unexpected(t: &Token, expected: &str) -> ParseError {
        Self::error_at(
            t,
            ParseErrorKind::Syntax {
                expected: expected.to_string(),
                found: t.tok.to_string(),
            },
        )
    }

    fn expect_punct(&mut self, c: char) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == Tok::Punct(c) {
            Ok(t)
        } else {
            Err(Self::unexpected(&t, &format!("`{c}`")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Token, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t),
            _ => Err(Self::unexpected(&t, &format!("`{kw}`"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            _ => Err(Self::unexpected(&t, what)),
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }
}

/// Parses kernel source in either accepted form into a composite.
pub fn parse_kernel(source: &str) -> Result<CompositeInstruction, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        line_mode: false,
    };
    let first = p.peek().clone();
    match &first.tok {
        Tok::Ident(s) if s == "__qpu__" => parse_c_form(&mut p),
        Tok::Ident(s) if s == "kernel" => {
            p.line_mode = true;
            p.skip_newlines();
            parse_line_form(&mut p)
        }
        _ => Err(Parser::unexpected(&first, "`__qpu__` or `kernel`")),
    }
}

struct Scope {
    register: Option<String>,
    variables: Vec<Arc<str>>,
    declared: HashSet<String>,
}

impl Scope {
    fn declare(&mut self, name: &str, at: &Token) -> Result<(), ParseError> {
        if !self.declared.insert(name.to_string()) {
            return Err(Parser::error_at(
                at,
                ParseErrorKind::DuplicateVariable(name.to_string()),
            ));
        }
        self.variables.push(Arc::from(name));
        Ok(())
    }

    fn check_register(&mut self, name: &str, at: &Token) -> Result<(), ParseError> {
        match &self.register {
            Some(r) if r != name => Err(Parser::error_at(
                at,
                ParseErrorKind::RegisterMismatch {
                    declared: r.clone(),
                    found: name.to_string(),
                },
            )),
            Some(_) => Ok(()),
            None => {
                self.register = Some(name.to_string());
                Ok(())
            }
        }
    }

    fn variable(&self, name: &str, at: &Token) -> Result<Arc<str>, ParseError> {
        self.variables
            .iter()
            .find(|v| &***v == name)
            .cloned()
            .ok_or_else(|| {
                Parser::error_at(at, ParseErrorKind::UndeclaredVariable(name.to_string()))
            })
    }
}

fn parse_c_form(p: &mut Parser) -> Result<CompositeInstruction, ParseError> {
    p.expect_keyword("__qpu__")?;
    p.expect_keyword("void")?;
    let (name, _) = p.expect_ident("kernel name")?;
    p.expect_punct('(')?;
    p.expect_keyword("qbit")?;
    let (reg, _) = p.expect_ident("register name")?;
    let mut scope = Scope {
        register: Some(reg),
        variables: Vec::new(),
        declared: HashSet::new(),
    };
    while p.eat_punct(',') {
        p.expect_keyword("double")?;
        let (v, at) = p.expect_ident("parameter name")?;
        scope.declare(&v, &at)?;
    }
    p.expect_punct(')')?;
    p.expect_punct('{')?;

    let mut circuit = new_circuit(name, &scope);
    loop {
        let t = p.peek().clone();
        match &t.tok {
            Tok::Punct('}') => {
                p.next();
                break;
            }
            Tok::Ident(_) => {
                let inst = parse_statement(p, &mut scope, true)?;
                circuit.add_instruction(inst);
                p.expect_punct(';')?;
            }
            _ => return Err(Parser::unexpected(&t, "gate name or `}`")),
        }
    }
    let end = p.next();
    if end.tok != Tok::Eof {
        return Err(Parser::unexpected(&end, "end of input"));
    }
    Ok(circuit)
}

fn parse_line_form(p: &mut Parser) -> Result<CompositeInstruction, ParseError> {
    p.expect_keyword("kernel")?;
    let (name, _) = p.expect_ident("kernel name")?;
    p.expect_punct('(')?;
    let mut scope = Scope {
        register: None,
        variables: Vec::new(),
        declared: HashSet::new(),
    };
    if !p.eat_punct(')') {
        loop {
            let (v, at) = p.expect_ident("variable name")?;
            scope.declare(&v, &at)?;
            if p.eat_punct(')') {
                break;
            }
            p.expect_punct(',')?;
        }
    }
    let mut circuit = new_circuit(name, &scope);
    expect_line_end(p)?;
    loop {
        p.skip_newlines();
        if p.peek().tok == Tok::Eof {
            break;
        }
        let inst = parse_statement(p, &mut scope, false)?;
        circuit.add_instruction(inst);
        expect_line_end(p)?;
    }
    Ok(circuit)
}

fn expect_line_end(p: &mut Parser) -> Result<(), ParseError> {
    let t = p.next();
    match t.tok {
        Tok::Newline | Tok::Eof => Ok(()),
        _ => Err(Parser::unexpected(&t, "end of line")),
    }
}

fn new_circuit(name: String, scope: &Scope) -> CompositeInstruction {
    let mut c = CompositeInstruction::new(name);
    for v in &scope.variables {
        c.add_variable(v);
    }
    c
}

/// One gate application. In the C-like form the operands are parenthesized.
fn parse_statement(p: &mut Parser, scope: &mut Scope, parens: bool) -> Result<Instruction, ParseError> {
    let (gname, gtok) = p.expect_ident("gate name")?;
    let gate: Gate = gname
        .parse()
        .map_err(|_| Parser::error_at(&gtok, ParseErrorKind::UnknownGate(gname.clone())))?;
    if parens {
        p.expect_punct('(')?;
    }
    let mut qubits = Vec::new();
    let mut params = Vec::new();
    loop {
        let t = p.peek().clone();
        let is_qubit = matches!(&t.tok, Tok::Ident(_))
            && p.toks.get(p.pos + 1).is_some_and(|n| n.tok == Tok::Punct('['));
        if is_qubit {
            if !params.is_empty() {
                return Err(Parser::unexpected(&t, "`)` after the angle"));
            }
            let (reg, at) = p.expect_ident("register")?;
            scope.check_register(&reg, &at)?;
            p.expect_punct('[')?;
            let it = p.next();
            let idx = match &it.tok {
                Tok::Number(s) => s
                    .parse::<usize>()
                    .map_err(|_| Parser::unexpected(&it, "qubit index"))?,
                _ => return Err(Parser::unexpected(&it, "qubit index")),
            };
            p.expect_punct(']')?;
            qubits.push(idx);
        } else {
            if qubits.is_empty() {
                return Err(Parser::unexpected(&t, "qubit operand"));
            }
            if !params.is_empty() {
                return Err(Parser::unexpected(&t, "end of operands"));
            }
            params.push(parse_angle(p, scope)?);
        }
        if !p.eat_punct(',') {
            break;
        }
    }
    if parens {
        p.expect_punct(')')?;
    }
    Instruction::new(gate, &qubits, &params)
        .map_err(|e| Parser::error_at(&gtok, ParseErrorKind::InvalidInstruction(e.to_string())))
}

fn parse_number(t: &Token) -> Result<f64, ParseError> {
    match &t.tok {
        Tok::Number(s) => s
            .parse::<f64>()
            .map_err(|_| Parser::unexpected(t, "real literal")),
        _ => Err(Parser::unexpected(t, "real literal")),
    }
}

/// `[sign] (real | var | real '*' var | var '*' real)`
fn parse_angle(p: &mut Parser, scope: &Scope) -> Result<Parameter, ParseError> {
    let mut sign = 1.0;
    if p.eat_punct('-') {
        sign = -1.0;
    } else {
        p.eat_punct('+');
    }
    let t = p.next();
    match &t.tok {
        Tok::Number(_) => {
            let v = parse_number(&t)?;
            if p.eat_punct('*') {
                let (name, at) = p.expect_ident("variable name")?;
                let var = scope.variable(&name, &at)?;
                Ok(Parameter::scaled(sign * v, var))
            } else {
                Ok(Parameter::Concrete(sign * v))
            }
        }
        Tok::Ident(name) => {
            let var = scope.variable(name, &t)?;
            if p.eat_punct('*') {
                let nt = p.next();
                let v = parse_number(&nt)?;
                Ok(Parameter::scaled(sign * v, var))
            } else {
                Ok(Parameter::scaled(sign, var))
            }
        }
        _ => Err(Parser::unexpected(&t, "angle expression")),
    }
}
