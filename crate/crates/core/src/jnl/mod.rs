//! JSON navigational logic: unary formulas select nodes, binary formulas
//! select pairs of nodes reachable by key, index, composition, test and
//! Kleene-star steps.

mod eval;
mod find;
pub(crate) mod parse;

use std::fmt;

use thiserror::Error;

use crate::regex::Pattern;
use crate::syntax::{quote, SyntaxError};
use crate::tree::JsonTree;

pub use eval::{eval_binary, eval_membership, eval_unary, NodePairSet};
pub use find::{compile_find_filter, FindError};
pub use parse::parse_jnl;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JnlError {
    #[error("malformed formula {0}")]
    MalformedFormula(#[from] SyntaxError),
    #[error(transparent)]
    Tree(#[from] crate::tree::TreeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum JnlUnary {
    Top,
    Not(Box<JnlUnary>),
    And(Box<JnlUnary>, Box<JnlUnary>),
    Or(Box<JnlUnary>, Box<JnlUnary>),
    /// `[α]`: some node is reachable through α.
    Exists(JnlBinary),
    /// `eq(α, A)`: some node reachable through α has value A.
    EqConst(JnlBinary, JsonTree),
    /// `eq(α, β)`: some α-reachable and some β-reachable node have equal values.
    EqPaths(JnlBinary, JnlBinary),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum JnlBinary {
    Test(Box<JnlUnary>),
    Key(String),
    KeyRegex(Pattern),
    /// 1-based array position.
    Idx(usize),
    /// Positions `i..=j`, `None` for an unbounded interval.
    IdxRange(usize, Option<usize>),
    Compose(Box<JnlBinary>, Box<JnlBinary>),
    Eps,
    Star(Box<JnlBinary>),
}

impl JnlUnary {
    pub fn not(a: JnlUnary) -> Self {
        JnlUnary::Not(Box::new(a))
    }

    pub fn and(a: JnlUnary, b: JnlUnary) -> Self {
        JnlUnary::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: JnlUnary, b: JnlUnary) -> Self {
        JnlUnary::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of all formulas, `Top` when empty.
    pub fn all(items: impl IntoIterator<Item = JnlUnary>) -> Self {
        items.into_iter().reduce(JnlUnary::and).unwrap_or(JnlUnary::Top)
    }

    /// Disjunction of all formulas, `!true` when empty.
    pub fn any(items: impl IntoIterator<Item = JnlUnary>) -> Self {
        items
            .into_iter()
            .reduce(JnlUnary::or)
            .unwrap_or_else(|| JnlUnary::not(JnlUnary::Top))
    }

    /// True iff the formula uses no regex axis, interval axis or star.
    pub fn is_deterministic(&self) -> bool {
        match self {
            JnlUnary::Top => true,
            JnlUnary::Not(a) => a.is_deterministic(),
            JnlUnary::And(a, b) | JnlUnary::Or(a, b) => a.is_deterministic() && b.is_deterministic(),
            JnlUnary::Exists(a) | JnlUnary::EqConst(a, _) => a.is_deterministic(),
            JnlUnary::EqPaths(a, b) => a.is_deterministic() && b.is_deterministic(),
        }
    }

    pub fn has_eq_paths(&self) -> bool {
        match self {
            JnlUnary::Top => false,
            JnlUnary::Not(a) => a.has_eq_paths(),
            JnlUnary::And(a, b) | JnlUnary::Or(a, b) => a.has_eq_paths() || b.has_eq_paths(),
            JnlUnary::Exists(a) | JnlUnary::EqConst(a, _) => a.has_eq_paths(),
            JnlUnary::EqPaths(..) => true,
        }
    }

    pub fn has_star(&self) -> bool {
        match self {
            JnlUnary::Top => false,
            JnlUnary::Not(a) => a.has_star(),
            JnlUnary::And(a, b) | JnlUnary::Or(a, b) => a.has_star() || b.has_star(),
            JnlUnary::Exists(a) | JnlUnary::EqConst(a, _) => a.has_star(),
            JnlUnary::EqPaths(a, b) => a.has_star() || b.has_star(),
        }
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            JnlUnary::Top => 1,
            JnlUnary::Not(a) => 1 + a.size(),
            JnlUnary::And(a, b) | JnlUnary::Or(a, b) => 1 + a.size() + b.size(),
            JnlUnary::Exists(a) | JnlUnary::EqConst(a, _) => 1 + a.size(),
            JnlUnary::EqPaths(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            JnlUnary::Or(..) => 0,
            JnlUnary::And(..) => 1,
            _ => 2,
        }
    }
}

impl JnlBinary {
    pub fn compose(a: JnlBinary, b: JnlBinary) -> Self {
        JnlBinary::Compose(Box::new(a), Box::new(b))
    }

    pub fn test(phi: JnlUnary) -> Self {
        JnlBinary::Test(Box::new(phi))
    }

    pub fn star(a: JnlBinary) -> Self {
        JnlBinary::Star(Box::new(a))
    }

    pub fn is_deterministic(&self) -> bool {
        match self {
            JnlBinary::Test(phi) => phi.is_deterministic(),
            JnlBinary::Key(_) | JnlBinary::Idx(_) | JnlBinary::Eps => true,
            JnlBinary::KeyRegex(_) | JnlBinary::IdxRange(..) | JnlBinary::Star(_) => false,
            JnlBinary::Compose(a, b) => a.is_deterministic() && b.is_deterministic(),
        }
    }

    pub fn has_eq_paths(&self) -> bool {
        match self {
            JnlBinary::Test(phi) => phi.has_eq_paths(),
            JnlBinary::Compose(a, b) => a.has_eq_paths() || b.has_eq_paths(),
            JnlBinary::Star(a) => a.has_eq_paths(),
            _ => false,
        }
    }

    pub fn has_star(&self) -> bool {
        match self {
            JnlBinary::Test(phi) => phi.has_star(),
            JnlBinary::Compose(a, b) => a.has_star() || b.has_star(),
            JnlBinary::Star(_) => true,
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            JnlBinary::Test(phi) => 1 + phi.size(),
            JnlBinary::Compose(a, b) => 1 + a.size() + b.size(),
            JnlBinary::Star(a) => 1 + a.size(),
            _ => 1,
        }
    }
}

impl fmt::Display for JnlUnary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, a: &JnlUnary, min: u8| {
            if a.precedence() < min {
                write!(f, "({a})")
            } else {
                write!(f, "{a}")
            }
        };
        match self {
            JnlUnary::Top => f.write_str("true"),
            JnlUnary::Not(a) => {
                f.write_str("!")?;
                child(f, a, 2)
            }
            JnlUnary::And(a, b) => {
                child(f, a, 1)?;
                f.write_str(" && ")?;
                child(f, b, 2)
            }
            JnlUnary::Or(a, b) => {
                child(f, a, 0)?;
                f.write_str(" || ")?;
                child(f, b, 1)
            }
            JnlUnary::Exists(a) => write!(f, "[{a}]"),
            JnlUnary::EqConst(a, c) => write!(f, "eq({a}, {})", c.canonical()),
            JnlUnary::EqPaths(a, b) => write!(f, "eq({a}, {b})"),
        }
    }
}

impl fmt::Display for JnlBinary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JnlBinary::Test(phi) => write!(f, "test({phi})"),
            JnlBinary::Key(w) => write!(f, "@{}", quote(w)),
            JnlBinary::KeyRegex(e) => write!(f, "@/{e}/"),
            JnlBinary::Idx(i) => write!(f, "#{i}"),
            JnlBinary::IdxRange(i, Some(j)) => write!(f, "#{i}:{j}"),
            JnlBinary::IdxRange(i, None) => write!(f, "#{i}:*"),
            JnlBinary::Compose(a, b) => {
                write!(f, "{a} / ")?;
                if matches!(**b, JnlBinary::Compose(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            JnlBinary::Eps => f.write_str("eps"),
            JnlBinary::Star(a) => write!(f, "({a})*"),
        }
    }
}
