//! Bounded satisfiability: search for a witness tree within explicit
//! depth, width and alphabet bounds. A SAT answer comes with a witness that
//! has been re-checked by the evaluator; an UNSAT answer only covers the
//! bounds it reports.

mod encode;
mod exhaustive;
mod inventory;
mod typed;

use std::fmt;

use thiserror::Error;

use crate::jnl::{eval_unary, JnlUnary};
use crate::jsl::{validate, JslFormula};
use crate::recursive::{eval_recursive, RecursiveError, RecursiveJsl};
use crate::tree::{JsonTree, JsonValue};

pub use encode::{encode_3sat, encode_qbf, Literal, Qbf, Quantifier};
pub use exhaustive::ExhaustiveStrategy;
pub use inventory::Inventory;
pub use typed::AutomatonStrategy;

/// Default limit on the work a strategy may spend before giving up.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatInput {
    Jnl(JnlUnary),
    Jsl(JslFormula),
    Rjsl(RecursiveJsl),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bounds {
    /// Height of the witness tree.
    pub max_depth: usize,
    /// Children per node.
    pub max_width: usize,
    /// Words drawn from each key or string pattern, and their length bound.
    pub max_atoms: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_depth: 3, max_width: 3, max_atoms: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatVerdict {
    Sat(JsonTree),
    UnsatUpToBound(Bounds),
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Sat(_))
    }

    pub fn witness(&self) -> Option<&JsonTree> {
        match self {
            SatVerdict::Sat(t) => Some(t),
            SatVerdict::UnsatUpToBound(_) => None,
        }
    }
}

impl fmt::Display for SatVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatVerdict::Sat(t) => write!(f, "SAT\n{}", t.canonical()),
            SatVerdict::UnsatUpToBound(b) => write!(f, "UNSAT up to ({},{},{})", b.max_depth, b.max_width, b.max_atoms),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("search space of about {estimate} exceeds the budget of {budget}")]
    BoundsTooLarge { estimate: u64, budget: u64 },
    #[error("not supported by strategy `{strategy}`: {reason}")]
    Unsupported { strategy: String, reason: String },
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error(transparent)]
    Recursive(#[from] RecursiveError),
    #[error("witness {0} does not satisfy the formula")]
    WitnessRejected(String),
}

pub trait SatStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, input: &SatInput, bounds: &Bounds, budget: u64) -> Result<SatVerdict, SatError>;
}

/// Strategies by name. The first registered one is the default.
pub struct StrategyRegistry {
    strategies: Vec<Box<dyn SatStrategy>>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = StrategyRegistry { strategies: Vec::new() };
        r.register(Box::new(AutomatonStrategy));
        r.register(Box::new(ExhaustiveStrategy));
        r
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry { strategies: Vec::new() }
    }

    /// Replaces a strategy of the same name.
    pub fn register(&mut self, s: Box<dyn SatStrategy>) {
        self.strategies.retain(|t| t.name() != s.name());
        self.strategies.push(s);
    }

    pub fn get(&self, name: &str) -> Result<&dyn SatStrategy, SatError> {
        self.strategies
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| SatError::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn default_strategy(&self) -> Option<&dyn SatStrategy> {
        self.strategies.first().map(|s| s.as_ref())
    }
}

/// The automaton strategy where it applies, exhaustive enumeration for JNL
/// with path equality.
pub fn sat_bounded(input: &SatInput, bounds: &Bounds) -> Result<SatVerdict, SatError> {
    sat_bounded_with_budget(input, bounds, DEFAULT_BUDGET)
}

pub fn sat_bounded_with_budget(input: &SatInput, bounds: &Bounds, budget: u64) -> Result<SatVerdict, SatError> {
    match input {
        SatInput::Jnl(phi) if phi.has_eq_paths() => ExhaustiveStrategy.solve(input, bounds, budget),
        _ => AutomatonStrategy.solve(input, bounds, budget),
    }
}

impl SatInput {
    /// Truth at the root, with the evaluator of the input's logic.
    pub fn holds(&self, t: &JsonTree) -> Result<bool, SatError> {
        Ok(match self {
            SatInput::Jnl(phi) => eval_unary(t, phi).contains(t.root()),
            SatInput::Jsl(phi) => validate(t, phi),
            SatInput::Rjsl(expr) => eval_recursive(expr, t)?,
        })
    }

    pub(crate) fn uses_unique(&self) -> bool {
        match self {
            SatInput::Jnl(_) => false,
            SatInput::Jsl(phi) => phi.uses_unique(),
            SatInput::Rjsl(e) => e.base.uses_unique() || e.definitions.iter().any(|(_, b)| b.uses_unique()),
        }
    }
}

/// Order on candidate witnesses: fewer nodes first, then objects before
/// arrays before strings before numbers at the root, then canonical text.
pub(crate) fn witness_key(v: &JsonValue, tree: &JsonTree) -> (usize, u8, String) {
    (tree.len(), v.kind().rank(), tree.canonical().to_string())
}

pub(crate) fn checked(input: &SatInput, t: JsonTree) -> Result<SatVerdict, SatError> {
    if input.holds(&t)? {
        Ok(SatVerdict::Sat(t))
    } else {
        Err(SatError::WitnessRejected(t.canonical().to_string()))
    }
}
