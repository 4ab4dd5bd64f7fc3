use super::{JslError, JslFormula, NodeTest};
use crate::tree::{subtree_eq, Atom, JsonTree, NodeId, NodeIx, NodeKind, NodeSet};

/// What a node test may observe about a node. Implemented for nodes of
/// concrete trees and for the partial trees built during satisfiability
/// search.
pub trait NodeView {
    fn kind(&self) -> NodeKind;
    fn atom(&self) -> Option<&Atom>;
    fn child_count(&self) -> usize;
    /// Only consulted for arrays.
    fn children_distinct(&self) -> bool;
    fn equals(&self, constant: &JsonTree) -> bool;
}

pub(crate) struct TreeNode<'a> {
    pub tree: &'a JsonTree,
    pub n: NodeIx,
}

impl NodeView for TreeNode<'_> {
    fn kind(&self) -> NodeKind {
        self.tree.kind(self.n)
    }

    fn atom(&self) -> Option<&Atom> {
        self.tree.atom(self.n)
    }

    fn child_count(&self) -> usize {
        self.tree.children(self.n).len()
    }

    fn children_distinct(&self) -> bool {
        self.tree.children_distinct(self.n)
    }

    fn equals(&self, constant: &JsonTree) -> bool {
        subtree_eq(self.tree, self.n, constant, constant.root())
    }
}

pub fn node_test_holds(test: &NodeTest, v: &dyn NodeView) -> bool {
    let int = || match v.atom() {
        Some(Atom::Int(i)) => Some(*i),
        _ => None,
    };
    match test {
        NodeTest::Arr => v.kind() == NodeKind::Arr,
        NodeTest::Obj => v.kind() == NodeKind::Obj,
        NodeTest::Str => v.kind() == NodeKind::Str,
        NodeTest::Int => v.kind() == NodeKind::Int,
        NodeTest::Unique => v.kind() == NodeKind::Arr && v.children_distinct(),
        NodeTest::Pattern(e) => matches!(v.atom(), Some(Atom::Str(s)) if e.matches(s)),
        NodeTest::Min(i) => int().is_some_and(|x| x >= *i),
        NodeTest::Max(i) => int().is_some_and(|x| x <= *i),
        NodeTest::MultOf(0) => int() == Some(0),
        NodeTest::MultOf(k) => int().is_some_and(|x| x % k == 0),
        NodeTest::MinCh(i) => v.child_count() >= *i,
        NodeTest::MaxCh(i) => v.child_count() <= *i,
        NodeTest::SameAs(a) => v.equals(a),
    }
}

/// True iff `n` is an array whose children are pairwise distinct values.
pub fn check_unique(tree: &JsonTree, n: &NodeId) -> Result<bool, JslError> {
    let ix = tree.lookup(n)?;
    Ok(tree.kind(ix) == NodeKind::Arr && tree.children_distinct(ix))
}

/// All nodes satisfying `phi`, each subformula evaluated once over the
/// whole tree.
pub fn eval_set(tree: &JsonTree, phi: &JslFormula) -> Result<NodeSet, JslError> {
    eval_set_env(tree, phi, &|v: &str| Err(JslError::FreeSymbol(v.to_string())))
}

/// [`eval_set`] with symbols read from `env`.
pub(crate) fn eval_set_env(
    t: &JsonTree,
    phi: &JslFormula,
    env: &dyn Fn(&str) -> Result<NodeSet, JslError>,
) -> Result<NodeSet, JslError> {
    Ok(match phi {
        JslFormula::True => NodeSet::full(t),
        JslFormula::Var(v) => env(v)?,
        JslFormula::Not(a) => eval_set_env(t, a, env)?.complement(),
        JslFormula::And(a, b) => {
            let mut s = eval_set_env(t, a, env)?;
            s.intersect_with(&eval_set_env(t, b, env)?);
            s
        }
        JslFormula::Or(a, b) => {
            let mut s = eval_set_env(t, a, env)?;
            s.union_with(&eval_set_env(t, b, env)?);
            s
        }
        JslFormula::Test(test) => {
            let mut s = NodeSet::empty(t);
            for n in t.nodes() {
                if node_test_holds(test, &TreeNode { tree: t, n }) {
                    s.insert(n);
                }
            }
            s
        }
        JslFormula::BoxKey(e, a) | JslFormula::DiaKey(e, a) => {
            let inner = eval_set_env(t, a, env)?;
            let edge = |c: NodeIx| t.key(c).is_some_and(|k| e.matches(k));
            modal(t, &inner, matches!(phi, JslFormula::BoxKey(..)), edge)
        }
        JslFormula::BoxIdx(i, j, a) | JslFormula::DiaIdx(i, j, a) => {
            let inner = eval_set_env(t, a, env)?;
            let edge = |c: NodeIx| t.position(c).is_some_and(|p| p >= *i && j.is_none_or(|j| p <= j));
            modal(t, &inner, matches!(phi, JslFormula::BoxIdx(..)), edge)
        }
    })
}

/// Nodes all (`universal`) or some of whose selected children are in `inner`.
pub(crate) fn modal(t: &JsonTree, inner: &NodeSet, universal: bool, edge: impl Fn(NodeIx) -> bool) -> NodeSet {
    let mut marked = NodeSet::empty(t);
    for c in t.nodes().skip(1) {
        if universal != inner.contains(c) && edge(c) {
            marked.insert(t.parent(c).unwrap());
        }
    }
    if universal {
        marked.complement()
    } else {
        marked
    }
}

/// `(J, n) ⊨ φ`
pub fn eval_jsl(tree: &JsonTree, n: &NodeId, phi: &JslFormula) -> Result<bool, JslError> {
    let ix = tree.lookup(n)?;
    holds(tree, ix, phi)
}

/// `J ⊨ φ`, i.e. `φ` holds at the root. Formulas with free symbols are
/// false.
pub fn validate(tree: &JsonTree, phi: &JslFormula) -> bool {
    holds(tree, tree.root(), phi).unwrap_or(false)
}

/// Top-down evaluation at one node; visits each (node, subformula) pair
/// at most once because every node has one parent.
fn holds(t: &JsonTree, n: NodeIx, phi: &JslFormula) -> Result<bool, JslError> {
    Ok(match phi {
        JslFormula::True => true,
        JslFormula::Var(v) => return Err(JslError::FreeSymbol(v.clone())),
        JslFormula::Not(a) => !holds(t, n, a)?,
        JslFormula::And(a, b) => holds(t, n, a)? && holds(t, n, b)?,
        JslFormula::Or(a, b) => holds(t, n, a)? || holds(t, n, b)?,
        JslFormula::Test(test) => node_test_holds(test, &TreeNode { tree: t, n }),
        JslFormula::BoxKey(e, a) | JslFormula::DiaKey(e, a) => {
            let universal = matches!(phi, JslFormula::BoxKey(..));
            if t.kind(n) != NodeKind::Obj {
                return Ok(universal);
            }
            let selected = t.children(n).iter().filter(|&&c| e.matches(t.key(c).unwrap()));
            quantify(t, selected.copied(), a, universal)?
        }
        JslFormula::BoxIdx(i, j, a) | JslFormula::DiaIdx(i, j, a) => {
            let universal = matches!(phi, JslFormula::BoxIdx(..));
            if t.kind(n) != NodeKind::Arr {
                return Ok(universal);
            }
            let ch = t.children(n);
            let lo = (*i - 1).min(ch.len());
            let hi = j.map_or(ch.len(), |j| j.min(ch.len())).max(lo);
            quantify(t, ch[lo..hi].iter().copied(), a, universal)?
        }
    })
}

fn quantify(
    t: &JsonTree,
    nodes: impl Iterator<Item = NodeIx>,
    phi: &JslFormula,
    universal: bool,
) -> Result<bool, JslError> {
    for c in nodes {
        if holds(t, c, phi)? != universal {
            return Ok(!universal);
        }
    }
    Ok(universal)
}
