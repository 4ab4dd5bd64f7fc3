//! Formal JSON trees, navigational and schema logics over them, schema
//! compilation, tree automata and bounded satisfiability.

pub mod automaton;
pub mod jnl;
pub mod jsl;
pub mod recursive;
pub mod regex;
pub mod sat;
pub mod schema;
pub mod syntax;
pub mod translate;
pub mod tree;

pub use tree::{parse_document, JsonTree, NodeId, NodeIx, NodeKind, NodeSet};
