use std::collections::HashMap;

use super::{JnlBinary, JnlError, JnlUnary};
use crate::tree::{subtree_eq, JsonTree, NodeId, NodeIx, NodeKind, NodeSet};

/// Pairs of nodes of one tree, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodePairSet {
    pub pairs: Vec<(NodeIx, NodeIx)>,
}

impl NodePairSet {
    pub fn contains(&self, a: NodeIx, b: NodeIx) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Evaluation context for one tree. Node sets of unary subformulas are
/// memoized by address so that tests inside stars are computed once.
pub(crate) struct Evaluator<'t> {
    tree: &'t JsonTree,
    memo: HashMap<*const JnlUnary, NodeSet>,
    classes: Option<Vec<u32>>,
}

impl<'t> Evaluator<'t> {
    pub fn new(tree: &'t JsonTree) -> Self {
        Evaluator { tree, memo: HashMap::new(), classes: None }
    }

    pub fn unary(&mut self, phi: &JnlUnary) -> NodeSet {
        let key = phi as *const JnlUnary;
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let t = self.tree;
        let out = match phi {
            JnlUnary::Top => NodeSet::full(t),
            JnlUnary::Not(a) => self.unary(a).complement(),
            JnlUnary::And(a, b) => {
                let mut s = self.unary(a);
                s.intersect_with(&self.unary(b));
                s
            }
            JnlUnary::Or(a, b) => {
                let mut s = self.unary(a);
                s.union_with(&self.unary(b));
                s
            }
            JnlUnary::Exists(alpha) => self.pre(alpha, &NodeSet::full(t)),
            JnlUnary::EqConst(alpha, c) => {
                let mut targets = NodeSet::empty(t);
                for n in t.nodes() {
                    if subtree_eq(t, n, c, c.root()) {
                        targets.insert(n);
                    }
                }
                self.pre(alpha, &targets)
            }
            JnlUnary::EqPaths(a, b) => self.eq_paths(a, b),
        };
        self.memo.insert(key, out.clone());
        out
    }

    fn eq_paths(&mut self, a: &JnlBinary, b: &JnlBinary) -> NodeSet {
        let t = self.tree;
        if self.classes.is_none() {
            self.classes = Some(t.equality_classes());
        }
        let mut out = NodeSet::empty(t);
        for n in t.nodes() {
            let mut single = NodeSet::empty(t);
            single.insert(n);
            let ra = self.post(a, &single);
            if ra.is_empty() {
                continue;
            }
            let rb = self.post(b, &single);
            let classes = self.classes.as_ref().unwrap();
            let mut seen = vec![false; t.len()];
            for m in ra.iter() {
                seen[classes[m.index()] as usize] = true;
            }
            if rb.iter().any(|m| seen[classes[m.index()] as usize]) {
                out.insert(n);
            }
        }
        out
    }

    /// `{n | ∃n' ∈ s, (n, n') ∈ ⟦α⟧}`
    pub fn pre(&mut self, alpha: &JnlBinary, s: &NodeSet) -> NodeSet {
        let t = self.tree;
        match alpha {
            JnlBinary::Test(phi) => {
                let mut out = s.clone();
                out.intersect_with(&self.unary(phi));
                out
            }
            JnlBinary::Eps => s.clone(),
            JnlBinary::Key(w) => self.parents(s, |c| t.key(c) == Some(w.as_str())),
            JnlBinary::KeyRegex(e) => self.parents(s, |c| t.key(c).is_some_and(|k| e.matches(k))),
            JnlBinary::Idx(i) => self.parents(s, |c| t.position(c) == Some(*i)),
            JnlBinary::IdxRange(i, j) => {
                self.parents(s, |c| t.position(c).is_some_and(|p| p >= *i && j.is_none_or(|j| p <= j)))
            }
            JnlBinary::Compose(a, b) => {
                let mid = self.pre(b, s);
                self.pre(a, &mid)
            }
            JnlBinary::Star(a) => {
                let mut reached = s.clone();
                let mut frontier = s.clone();
                while !frontier.is_empty() {
                    let mut next = self.pre(a, &frontier);
                    next.difference_with(&reached);
                    reached.union_with(&next);
                    frontier = next;
                }
                reached
            }
        }
    }

    fn parents(&self, s: &NodeSet, edge: impl Fn(NodeIx) -> bool) -> NodeSet {
        let t = self.tree;
        let mut out = NodeSet::empty(t);
        for c in s.iter() {
            if let Some(p) = t.parent(c) {
                if edge(c) {
                    out.insert(p);
                }
            }
        }
        out
    }

    /// `{n' | ∃n ∈ s, (n, n') ∈ ⟦α⟧}`
    pub fn post(&mut self, alpha: &JnlBinary, s: &NodeSet) -> NodeSet {
        let t = self.tree;
        match alpha {
            JnlBinary::Test(phi) => {
                let mut out = s.clone();
                out.intersect_with(&self.unary(phi));
                out
            }
            JnlBinary::Eps => s.clone(),
            JnlBinary::Key(w) => self.children(s, NodeKind::Obj, |c| t.key(c) == Some(w.as_str())),
            JnlBinary::KeyRegex(e) => self.children(s, NodeKind::Obj, |c| t.key(c).is_some_and(|k| e.matches(k))),
            JnlBinary::Idx(i) => self.children(s, NodeKind::Arr, |c| t.position(c) == Some(*i)),
            JnlBinary::IdxRange(i, j) => self.children(s, NodeKind::Arr, |c| {
                t.position(c).is_some_and(|p| p >= *i && j.is_none_or(|j| p <= j))
            }),
            JnlBinary::Compose(a, b) => {
                let mid = self.post(a, s);
                self.post(b, &mid)
            }
            JnlBinary::Star(a) => {
                let mut reached = s.clone();
                let mut frontier = s.clone();
                while !frontier.is_empty() {
                    let mut next = self.post(a, &frontier);
                    next.difference_with(&reached);
                    reached.union_with(&next);
                    frontier = next;
                }
                reached
            }
        }
    }

    fn children(&self, s: &NodeSet, kind: NodeKind, edge: impl Fn(NodeIx) -> bool) -> NodeSet {
        let t = self.tree;
        let mut out = NodeSet::empty(t);
        for n in s.iter() {
            if t.kind(n) != kind {
                continue;
            }
            for &c in t.children(n) {
                if edge(c) {
                    out.insert(c);
                }
            }
        }
        out
    }
}

/// `⟦φ⟧_J`
pub fn eval_unary(tree: &JsonTree, phi: &JnlUnary) -> NodeSet {
    Evaluator::new(tree).unary(phi)
}

/// `⟦α⟧_J`
pub fn eval_binary(tree: &JsonTree, alpha: &JnlBinary) -> NodePairSet {
    let mut ev = Evaluator::new(tree);
    let mut pairs = Vec::new();
    for n in tree.nodes() {
        let mut single = NodeSet::empty(tree);
        single.insert(n);
        for m in ev.post(alpha, &single).iter() {
            pairs.push((n, m));
        }
    }
    pairs.sort_unstable();
    NodePairSet { pairs }
}

/// Whether `n ∈ ⟦φ⟧_J`. Deterministic formulas are decided by following
/// the single path each binary subformula allows; others fall back to the
/// set evaluator.
pub fn eval_membership(tree: &JsonTree, phi: &JnlUnary, n: &NodeId) -> Result<bool, JnlError> {
    let ix = tree.lookup(n)?;
    if phi.is_deterministic() {
        Ok(holds(tree, phi, ix))
    } else {
        Ok(eval_unary(tree, phi).contains(ix))
    }
}

fn holds(t: &JsonTree, phi: &JnlUnary, n: NodeIx) -> bool {
    match phi {
        JnlUnary::Top => true,
        JnlUnary::Not(a) => !holds(t, a, n),
        JnlUnary::And(a, b) => holds(t, a, n) && holds(t, b, n),
        JnlUnary::Or(a, b) => holds(t, a, n) || holds(t, b, n),
        JnlUnary::Exists(a) => follow(t, a, n).is_some(),
        JnlUnary::EqConst(a, c) => follow(t, a, n).is_some_and(|m| subtree_eq(t, m, c, c.root())),
        JnlUnary::EqPaths(a, b) => match (follow(t, a, n), follow(t, b, n)) {
            (Some(x), Some(y)) => subtree_eq(t, x, t, y),
            _ => false,
        },
    }
}

fn follow(t: &JsonTree, alpha: &JnlBinary, n: NodeIx) -> Option<NodeIx> {
    match alpha {
        JnlBinary::Test(phi) => holds(t, phi, n).then_some(n),
        JnlBinary::Key(w) => t.child_by_key(n, w),
        JnlBinary::Idx(i) => t.child_by_index(n, *i),
        JnlBinary::Eps => Some(n),
        JnlBinary::Compose(a, b) => follow(t, b, follow(t, a, n)?),
        JnlBinary::KeyRegex(_) | JnlBinary::IdxRange(..) | JnlBinary::Star(_) => {
            unreachable!("only called on deterministic formulas")
        }
    }
}
