//! JSON schema logic: node tests combined with boolean connectives and
//! existential/universal modalities over key patterns and index intervals.

pub(crate) mod eval;
pub(crate) mod parse;

use std::fmt;

use thiserror::Error;

use crate::regex::Pattern;
use crate::syntax::{quote, SyntaxError};
use crate::tree::JsonTree;

pub use eval::{check_unique, eval_jsl, eval_set, node_test_holds, validate, NodeView};
pub use parse::{parse_jsl, parse_jsl_open};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JslError {
    #[error("malformed formula {0}")]
    MalformedFormula(#[from] SyntaxError),
    #[error("undefined symbol `{0}`")]
    FreeSymbol(String),
    #[error(transparent)]
    Tree(#[from] crate::tree::TreeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeTest {
    Arr,
    Obj,
    Str,
    Int,
    Unique,
    Pattern(Pattern),
    /// Integer at least the bound.
    Min(u64),
    /// Integer at most the bound.
    Max(u64),
    /// Integer multiple of the argument; `multOf(0)` holds only on 0.
    MultOf(u64),
    MinCh(usize),
    MaxCh(usize),
    SameAs(JsonTree),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum JslFormula {
    True,
    Not(Box<JslFormula>),
    And(Box<JslFormula>, Box<JslFormula>),
    Or(Box<JslFormula>, Box<JslFormula>),
    Test(NodeTest),
    BoxKey(Pattern, Box<JslFormula>),
    DiaKey(Pattern, Box<JslFormula>),
    /// Positions `i..=j` (1-based), `None` for unbounded.
    BoxIdx(usize, Option<usize>, Box<JslFormula>),
    DiaIdx(usize, Option<usize>, Box<JslFormula>),
    /// A definition symbol of a recursive expression.
    Var(String),
}

impl JslFormula {
    pub fn falsum() -> Self {
        JslFormula::not(JslFormula::True)
    }

    pub fn not(a: JslFormula) -> Self {
        JslFormula::Not(Box::new(a))
    }

    pub fn and(a: JslFormula, b: JslFormula) -> Self {
        JslFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: JslFormula, b: JslFormula) -> Self {
        JslFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn all(items: impl IntoIterator<Item = JslFormula>) -> Self {
        items.into_iter().reduce(JslFormula::and).unwrap_or(JslFormula::True)
    }

    pub fn any(items: impl IntoIterator<Item = JslFormula>) -> Self {
        items.into_iter().reduce(JslFormula::or).unwrap_or_else(JslFormula::falsum)
    }

    pub fn test(t: NodeTest) -> Self {
        JslFormula::Test(t)
    }

    pub fn box_key(e: Pattern, a: JslFormula) -> Self {
        JslFormula::BoxKey(e, Box::new(a))
    }

    pub fn dia_key(e: Pattern, a: JslFormula) -> Self {
        JslFormula::DiaKey(e, Box::new(a))
    }

    pub fn box_idx(i: usize, j: Option<usize>, a: JslFormula) -> Self {
        JslFormula::BoxIdx(i, j, Box::new(a))
    }

    pub fn dia_idx(i: usize, j: Option<usize>, a: JslFormula) -> Self {
        JslFormula::DiaIdx(i, j, Box::new(a))
    }

    pub fn size(&self) -> usize {
        match self {
            JslFormula::Not(a)
            | JslFormula::BoxKey(_, a)
            | JslFormula::DiaKey(_, a)
            | JslFormula::BoxIdx(_, _, a)
            | JslFormula::DiaIdx(_, _, a) => 1 + a.size(),
            JslFormula::And(a, b) | JslFormula::Or(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Maximum nesting of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            JslFormula::Not(a) => a.modal_depth(),
            JslFormula::And(a, b) | JslFormula::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            JslFormula::BoxKey(_, a)
            | JslFormula::DiaKey(_, a)
            | JslFormula::BoxIdx(_, _, a)
            | JslFormula::DiaIdx(_, _, a) => 1 + a.modal_depth(),
            _ => 0,
        }
    }

    /// Every key pattern is a single word and every interval a single index.
    pub fn is_deterministic(&self) -> bool {
        match self {
            JslFormula::Not(a) => a.is_deterministic(),
            JslFormula::And(a, b) | JslFormula::Or(a, b) => a.is_deterministic() && b.is_deterministic(),
            JslFormula::BoxKey(e, a) | JslFormula::DiaKey(e, a) => e.as_word().is_some() && a.is_deterministic(),
            JslFormula::BoxIdx(i, j, a) | JslFormula::DiaIdx(i, j, a) => *j == Some(*i) && a.is_deterministic(),
            _ => true,
        }
    }

    pub fn uses_unique(&self) -> bool {
        self.any_test(&|t| matches!(t, NodeTest::Unique))
    }

    pub fn any_test(&self, pred: &dyn Fn(&NodeTest) -> bool) -> bool {
        match self {
            JslFormula::Test(t) => pred(t),
            JslFormula::Not(a)
            | JslFormula::BoxKey(_, a)
            | JslFormula::DiaKey(_, a)
            | JslFormula::BoxIdx(_, _, a)
            | JslFormula::DiaIdx(_, _, a) => a.any_test(pred),
            JslFormula::And(a, b) | JslFormula::Or(a, b) => a.any_test(pred) || b.any_test(pred),
            _ => false,
        }
    }

    /// Symbols occurring in the formula, in order of first occurrence.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_vars(0, &mut |name, _| {
            if !out.iter().any(|s: &String| s == name) {
                out.push(name.to_string());
            }
        });
        out
    }

    /// Calls `f(name, modal_depth)` for every symbol occurrence.
    pub fn visit_vars(&self, depth: usize, f: &mut dyn FnMut(&str, usize)) {
        match self {
            JslFormula::Var(v) => f(v, depth),
            JslFormula::Not(a) => a.visit_vars(depth, f),
            JslFormula::And(a, b) | JslFormula::Or(a, b) => {
                a.visit_vars(depth, f);
                b.visit_vars(depth, f);
            }
            JslFormula::BoxKey(_, a)
            | JslFormula::DiaKey(_, a)
            | JslFormula::BoxIdx(_, _, a)
            | JslFormula::DiaIdx(_, _, a) => a.visit_vars(depth + 1, f),
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            JslFormula::Or(..) => 0,
            JslFormula::And(..) => 1,
            _ => 2,
        }
    }
}

fn write_interval(f: &mut fmt::Formatter<'_>, i: usize, j: Option<usize>) -> fmt::Result {
    match j {
        Some(j) if j == i => write!(f, "{i}"),
        Some(j) => write!(f, "{i}:{j}"),
        None => write!(f, "{i}:*"),
    }
}

fn write_key(f: &mut fmt::Formatter<'_>, e: &Pattern) -> fmt::Result {
    match e.as_word() {
        Some(w) => f.write_str(&quote(w)),
        None => write!(f, "/{e}/"),
    }
}

impl fmt::Display for NodeTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeTest::Arr => f.write_str("arr"),
            NodeTest::Obj => f.write_str("obj"),
            NodeTest::Str => f.write_str("str"),
            NodeTest::Int => f.write_str("int"),
            NodeTest::Unique => f.write_str("unique"),
            NodeTest::Pattern(e) => write!(f, "pattern(/{e}/)"),
            NodeTest::Min(i) => write!(f, "min({i})"),
            NodeTest::Max(i) => write!(f, "max({i})"),
            NodeTest::MultOf(i) => write!(f, "multOf({i})"),
            NodeTest::MinCh(i) => write!(f, "minCh({i})"),
            NodeTest::MaxCh(i) => write!(f, "maxCh({i})"),
            NodeTest::SameAs(a) => write!(f, "same({})", a.canonical()),
        }
    }
}

impl fmt::Display for JslFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, a: &JslFormula, min: u8| {
            if a.precedence() < min {
                write!(f, "({a})")
            } else {
                write!(f, "{a}")
            }
        };
        match self {
            JslFormula::True => f.write_str("true"),
            JslFormula::Not(a) if **a == JslFormula::True => f.write_str("false"),
            JslFormula::Not(a) => {
                f.write_str("!")?;
                child(f, a, 2)
            }
            JslFormula::And(a, b) => {
                child(f, a, 1)?;
                f.write_str(" && ")?;
                child(f, b, 2)
            }
            JslFormula::Or(a, b) => {
                child(f, a, 0)?;
                f.write_str(" || ")?;
                child(f, b, 1)
            }
            JslFormula::Test(t) => write!(f, "{t}"),
            JslFormula::BoxKey(e, a) | JslFormula::DiaKey(e, a) => {
                f.write_str(if matches!(self, JslFormula::BoxKey(..)) { "box(" } else { "dia(" })?;
                write_key(f, e)?;
                f.write_str(") ")?;
                child(f, a, 2)
            }
            JslFormula::BoxIdx(i, j, a) | JslFormula::DiaIdx(i, j, a) => {
                f.write_str(if matches!(self, JslFormula::BoxIdx(..)) { "box(" } else { "dia(" })?;
                write_interval(f, *i, *j)?;
                f.write_str(") ")?;
                child(f, a, 2)
            }
            JslFormula::Var(v) => f.write_str(v),
        }
    }
}
