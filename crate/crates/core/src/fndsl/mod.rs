//! A small piecewise-function language for user-defined maps ℕ → ℕ.
//!
//! ```text
//! spec  := case+
//! case  := "when" bool "->" expr ";"
//! bool  := cmp (("and" | "or") cmp)*
//! cmp   := expr ("<" | "<=" | "==" | ">=" | ">") expr
//! expr  := term (("+" | "-") term)*
//! term  := atom (("*" | "div" | "mod") atom)*
//! atom  := integer | "k" | "i" | "pow2" "(" expr ")" | "blog" "(" expr ")" | "(" expr ")"
//! ```
//!
//! `k` is the argument and `i` abbreviates `blog(k) = ⌊log2 k⌋`. Guards
//! combine left to right with no precedence between `and` and `or`, and
//! short-circuit. The first case whose guard holds supplies the value.
//! All arithmetic is on naturals: subtraction below zero, overflow, division
//! by zero and `blog(0)` are errors. `#` starts a line comment.

mod lexer;
mod parser;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::interval::Interval;
use crate::maps::{verify_injective, DslMap, InjectivityReport};

/// The 2^n shuffle written in the DSL.
pub const SH_DSL: &str = include_str!("../../dsl/sh.dsl");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{line}:{column}: {message}{}", .file.as_ref().map(|f| format!("{f}:")).unwrap_or_default(), expected_suffix(.expected))]
pub struct ParseError {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    match expected {
        [] => String::new(),
        [one] => format!(" (expected {one})"),
        many => format!(" (expected one of {})", many.join(", ")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no case matches k = {0}")]
    NoCaseMatches(u64),
    #[error("division by zero at k = {0}")]
    DivisionByZero(u64),
    #[error("blog(0) at k = {0}")]
    BlogOfZero(u64),
    #[error("overflow at k = {0}")]
    Overflow(u64),
    #[error("subtraction below zero at k = {0}")]
    Underflow(u64),
    #[error("k must be at least 1")]
    ZeroArgument,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lit(u64),
    K,
    /// `i`, i.e. `blog(k)`
    BlockIndex,
    Pow2(Box<Expr>),
    Blog(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cmp {
    pub op: CmpOp,
    pub lhs: Expr,
    pub rhs: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conn {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    pub first: Cmp,
    pub rest: Vec<(Conn, Cmp)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub guard: Guard,
    pub body: Expr,
}

/// Source lines a case spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start_line: usize,
    pub end_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapSpec {
    cases: Vec<Case>,
    spans: Vec<Span>,
    source: String,
    origin: Option<PathBuf>,
}

pub fn parse(text: &str) -> Result<MapSpec, ParseError> {
    parser::parse_source(text)
}

pub fn parse_file(path: &Path) -> Result<MapSpec, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut spec = parse(&text).map_err(|mut e| {
        e.file = Some(path.display().to_string());
        e
    })?;
    spec.origin = Some(path.to_path_buf());
    Ok(spec)
}

struct Ctx {
    k: u64,
}

impl Ctx {
    fn expr(&self, e: &Expr) -> Result<u64, EvalError> {
        let k = self.k;
        Ok(match e {
            Expr::Lit(n) => *n,
            Expr::K => k,
            Expr::BlockIndex => blog(k, k)?,
            Expr::Pow2(x) => {
                let x = self.expr(x)?;
                if x >= 64 {
                    return Err(EvalError::Overflow(k));
                }
                1u64 << x
            }
            Expr::Blog(x) => blog(self.expr(x)?, k)?,
            Expr::Bin(op, l, r) => {
                let (l, r) = (self.expr(l)?, self.expr(r)?);
                match op {
                    BinOp::Add => l.checked_add(r).ok_or(EvalError::Overflow(k))?,
                    BinOp::Sub => l.checked_sub(r).ok_or(EvalError::Underflow(k))?,
                    BinOp::Mul => l.checked_mul(r).ok_or(EvalError::Overflow(k))?,
                    BinOp::Div => l.checked_div(r).ok_or(EvalError::DivisionByZero(k))?,
                    BinOp::Mod => l.checked_rem(r).ok_or(EvalError::DivisionByZero(k))?,
                }
            }
        })
    }

    fn cmp(&self, c: &Cmp) -> Result<bool, EvalError> {
        let (l, r) = (self.expr(&c.lhs)?, self.expr(&c.rhs)?);
        Ok(match c.op {
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Eq => l == r,
            CmpOp::Ge => l >= r,
            CmpOp::Gt => l > r,
        })
    }

    fn guard(&self, g: &Guard) -> Result<bool, EvalError> {
        let mut value = self.cmp(&g.first)?;
        for (conn, c) in &g.rest {
            value = match conn {
                Conn::And => value && self.cmp(c)?,
                Conn::Or => value || self.cmp(c)?,
            };
        }
        Ok(value)
    }
}

fn blog(x: u64, k: u64) -> Result<u64, EvalError> {
    if x == 0 {
        Err(EvalError::BlogOfZero(k))
    } else {
        Ok(63 - x.leading_zeros() as u64)
    }
}

impl MapSpec {
    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn origin(&self) -> Option<&Path> {
        self.origin.as_deref()
    }

    /// The value of the first case whose guard holds at `k`.
    pub fn eval(&self, k: u64) -> Result<u64, EvalError> {
        if k == 0 {
            return Err(EvalError::ZeroArgument);
        }
        let ctx = Ctx { k };
        for case in &self.cases {
            if ctx.guard(&case.guard)? {
                return ctx.expr(&case.body);
            }
        }
        Err(EvalError::NoCaseMatches(k))
    }

    /// Index of the case that fires at `k`.
    pub fn matching_case(&self, k: u64) -> Result<Option<usize>, EvalError> {
        let ctx = Ctx { k };
        for (idx, case) in self.cases.iter().enumerate() {
            if ctx.guard(&case.guard)? {
                return Ok(Some(idx));
            }
        }
        Ok(None)
    }
}

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Add | BinOp::Sub => 1,
        BinOp::Mul | BinOp::Div | BinOp::Mod => 2,
    }
}

fn op_str(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "div",
        BinOp::Mod => "mod",
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parent: u8, right: bool) -> fmt::Result {
    match e {
        Expr::Bin(op, ..) if prec(*op) < parent || (right && prec(*op) == parent) => {
            write!(f, "({e})")
        }
        _ => write!(f, "{e}"),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(n) => write!(f, "{n}"),
            Expr::K => f.write_str("k"),
            Expr::BlockIndex => f.write_str("i"),
            Expr::Pow2(x) => write!(f, "pow2({x})"),
            Expr::Blog(x) => write!(f, "blog({x})"),
            Expr::Bin(op, l, r) => {
                write_operand(f, l, prec(*op), false)?;
                write!(f, " {} ", op_str(*op))?;
                write_operand(f, r, prec(*op), true)
            }
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.first)?;
        for (conn, c) in &self.rest {
            let word = match conn {
                Conn::And => "and",
                Conn::Or => "or",
            };
            write!(f, " {word} {c}")?;
        }
        Ok(())
    }
}

/// Canonical text; parsing it yields the same cases.
impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for case in &self.cases {
            writeln!(f, "when {} -> {};", case.guard, case.body)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TotalityFailure {
    pub k: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DslCheckReport {
    pub window: Interval,
    pub cases: usize,
    pub total: bool,
    pub failure: Option<TotalityFailure>,
    /// Only computed when the spec is total on the window.
    pub injectivity: Option<InjectivityReport>,
}

impl DslCheckReport {
    pub fn ok(&self) -> bool {
        self.total && self.injectivity.as_ref().is_some_and(|r| r.ok)
    }
}

pub const MAX_CHECK_WINDOW: u64 = 1 << 22;

/// Totality on `window`, then injectivity.
pub fn check(spec: &MapSpec, window: &Interval) -> Result<DslCheckReport, Error> {
    if window.len() > MAX_CHECK_WINDOW {
        return Err(Error::Precondition(format!(
            "check window {window} exceeds 2^22 points"
        )));
    }
    let failure = window.iter().find_map(|k| {
        spec.eval(k).err().map(|e| TotalityFailure {
            k,
            reason: e.to_string(),
        })
    });
    let injectivity = match failure {
        None => Some(verify_injective(&DslMap::new("dsl", spec.clone()), window)?),
        Some(_) => None,
    };
    Ok(DslCheckReport {
        window: *window,
        cases: spec.cases.len(),
        total: failure.is_none(),
        failure,
        injectivity,
    })
}
