//! Alternating automata over JSON trees. Node states are derived from node
//! tests and other states of the same node; tree states are derived from
//! the states of the children through quantified atoms.

mod build;

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::jsl::{node_test_holds, NodeTest, NodeView};
use crate::jsl::eval::TreeNode;
use crate::regex::Pattern;
use crate::tree::{EdgeLabel, JsonTree};

pub use build::{jnl_to_automaton, jsl_to_automaton, recursive_to_automaton};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("node rules form a cycle through states {0:?}")]
    CyclicNodeRules(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quant {
    Exists,
    Forall,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axis {
    Key(Pattern),
    /// Positions `i..=j`, 1-based, `None` for unbounded.
    Idx(usize, Option<usize>),
}

impl Axis {
    pub fn matches(&self, label: &EdgeLabel) -> bool {
        match (self, label) {
            (Axis::Key(e), EdgeLabel::Key(w)) => e.matches(w),
            (Axis::Idx(i, j), EdgeLabel::Index(p)) => p >= i && j.is_none_or(|j| *p <= j),
            _ => false,
        }
    }
}

/// Positive boolean combination over states of the same node, node tests
/// and negated node tests.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeRule {
    True,
    False,
    State(usize),
    Test(NodeTest),
    NotTest(NodeTest),
    And(Vec<NodeRule>),
    Or(Vec<NodeRule>),
}

/// Positive boolean combination over quantified child states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TreeRule {
    True,
    False,
    Atom(Quant, Axis, usize),
    And(Vec<TreeRule>),
    Or(Vec<TreeRule>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Node(NodeRule),
    Tree(TreeRule),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JAutomaton {
    rules: Vec<Rule>,
    finals: Vec<usize>,
}

impl NodeRule {
    pub(crate) fn eval(&self, view: &dyn NodeView, s: &FixedBitSet) -> bool {
        match self {
            NodeRule::True => true,
            NodeRule::False => false,
            NodeRule::State(q) => s.contains(*q),
            NodeRule::Test(t) => node_test_holds(t, view),
            NodeRule::NotTest(t) => !node_test_holds(t, view),
            NodeRule::And(rs) => rs.iter().all(|r| r.eval(view, s)),
            NodeRule::Or(rs) => rs.iter().any(|r| r.eval(view, s)),
        }
    }

    fn dual(&self, map: &dyn Fn(usize) -> usize) -> NodeRule {
        match self {
            NodeRule::True => NodeRule::False,
            NodeRule::False => NodeRule::True,
            NodeRule::State(q) => NodeRule::State(map(*q)),
            NodeRule::Test(t) => NodeRule::NotTest(t.clone()),
            NodeRule::NotTest(t) => NodeRule::Test(t.clone()),
            NodeRule::And(rs) => NodeRule::Or(rs.iter().map(|r| r.dual(map)).collect()),
            NodeRule::Or(rs) => NodeRule::And(rs.iter().map(|r| r.dual(map)).collect()),
        }
    }

    pub(crate) fn states(&self, out: &mut Vec<usize>) {
        match self {
            NodeRule::State(q) => out.push(*q),
            NodeRule::And(rs) | NodeRule::Or(rs) => rs.iter().for_each(|r| r.states(out)),
            _ => {}
        }
    }
}

impl TreeRule {
    pub fn eval(&self, atom: &mut dyn FnMut(Quant, &Axis, usize) -> bool) -> bool {
        match self {
            TreeRule::True => true,
            TreeRule::False => false,
            TreeRule::Atom(quant, axis, q) => atom(*quant, axis, *q),
            TreeRule::And(rs) => rs.iter().all(|r| r.eval(atom)),
            TreeRule::Or(rs) => rs.iter().any(|r| r.eval(atom)),
        }
    }

    fn dual(&self, map: &dyn Fn(usize) -> usize) -> TreeRule {
        match self {
            TreeRule::True => TreeRule::False,
            TreeRule::False => TreeRule::True,
            TreeRule::Atom(Quant::Exists, axis, q) => TreeRule::Atom(Quant::Forall, axis.clone(), map(*q)),
            TreeRule::Atom(Quant::Forall, axis, q) => TreeRule::Atom(Quant::Exists, axis.clone(), map(*q)),
            TreeRule::And(rs) => TreeRule::Or(rs.iter().map(|r| r.dual(map)).collect()),
            TreeRule::Or(rs) => TreeRule::And(rs.iter().map(|r| r.dual(map)).collect()),
        }
    }

    fn atoms<'a>(&'a self, out: &mut Vec<(Quant, &'a Axis, usize)>) {
        match self {
            TreeRule::Atom(quant, axis, q) => out.push((*quant, axis, *q)),
            TreeRule::And(rs) | TreeRule::Or(rs) => rs.iter().for_each(|r| r.atoms(out)),
            _ => {}
        }
    }
}

impl Rule {
    fn dual(&self, map: &dyn Fn(usize) -> usize) -> Rule {
        match self {
            Rule::Node(r) => Rule::Node(r.dual(map)),
            Rule::Tree(r) => Rule::Tree(r.dual(map)),
        }
    }
}

impl JAutomaton {
    pub fn new() -> Self {
        JAutomaton::default()
    }

    pub fn add_node_state(&mut self, rule: NodeRule) -> usize {
        self.rules.push(Rule::Node(rule));
        self.rules.len() - 1
    }

    pub fn add_tree_state(&mut self, rule: TreeRule) -> usize {
        self.rules.push(Rule::Tree(rule));
        self.rules.len() - 1
    }

    pub fn set_rule(&mut self, q: usize, rule: Rule) {
        self.rules[q] = rule;
    }

    pub fn set_finals(&mut self, finals: Vec<usize>) {
        self.finals = finals;
    }

    pub fn state_count(&self) -> usize {
        self.rules.len()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn finals(&self) -> &[usize] {
        &self.finals
    }

    pub fn is_tree_state(&self, q: usize) -> bool {
        matches!(self.rules[q], Rule::Tree(_))
    }

    /// Replaces the rules of states `range` by their duals, with `map`
    /// applied to every referenced state.
    pub(crate) fn dualize_range(&mut self, range: std::ops::Range<usize>, map: &dyn Fn(usize) -> usize) {
        for q in range {
            self.rules[q] = self.rules[q].dual(map);
        }
    }

    /// Node states ordered so that every state comes after the node states
    /// its rule uses.
    pub fn node_order(&self) -> Result<Vec<usize>, AutomatonError> {
        let n = self.rules.len();
        let mut deps = vec![Vec::new(); n];
        for (q, r) in self.rules.iter().enumerate() {
            if let Rule::Node(r) = r {
                let mut used = Vec::new();
                r.states(&mut used);
                deps[q] = used.into_iter().filter(|&p| !self.is_tree_state(p)).collect();
            }
        }
        // 0 = unvisited, 1 = in progress, 2 = done
        let mut mark = vec![0u8; n];
        let mut order = Vec::new();
        for start in 0..n {
            if mark[start] != 0 || self.is_tree_state(start) {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            mark[start] = 1;
            while let Some(&mut (q, ref mut next)) = stack.last_mut() {
                if *next < deps[q].len() {
                    let p = deps[q][*next];
                    *next += 1;
                    match mark[p] {
                        0 => {
                            mark[p] = 1;
                            stack.push((p, 0));
                        }
                        1 => {
                            let at = stack.iter().position(|&(s, _)| s == p).unwrap();
                            return Err(AutomatonError::CyclicNodeRules(stack[at..].iter().map(|&(s, _)| s).collect()));
                        }
                        _ => {}
                    }
                } else {
                    mark[q] = 2;
                    order.push(q);
                    stack.pop();
                }
            }
        }
        Ok(order)
    }

    pub fn check_acyclic(&self) -> Result<(), AutomatonError> {
        self.node_order().map(|_| ())
    }

    /// Distinct quantified atoms used by tree rules.
    pub fn quant_atoms(&self) -> Vec<(Quant, Axis, usize)> {
        let mut out: Vec<(Quant, Axis, usize)> = Vec::new();
        for r in &self.rules {
            if let Rule::Tree(r) = r {
                let mut atoms = Vec::new();
                r.atoms(&mut atoms);
                for (quant, axis, q) in atoms {
                    if !out.iter().any(|(a, b, c)| *a == quant && b == axis && *c == q) {
                        out.push((quant, axis.clone(), q));
                    }
                }
            }
        }
        out
    }

    /// The state set of one node: tree states from `atom`, which answers
    /// quantified atoms over the children, then node states in `order`.
    pub fn node_states(
        &self,
        order: &[usize],
        view: &dyn NodeView,
        atom: &mut dyn FnMut(Quant, &Axis, usize) -> bool,
    ) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.rules.len());
        for (q, r) in self.rules.iter().enumerate() {
            if let Rule::Tree(r) = r {
                if r.eval(atom) {
                    s.insert(q);
                }
            }
        }
        for &q in order {
            if let Rule::Node(r) = &self.rules[q] {
                if r.eval(view, &s) {
                    s.insert(q);
                }
            }
        }
        s
    }

    pub fn accepts_states(&self, s: &FixedBitSet) -> bool {
        self.finals.iter().any(|&f| s.contains(f))
    }

    /// State sets of every node, computed bottom-up.
    pub fn run(&self, t: &JsonTree) -> Vec<FixedBitSet> {
        let order = self.node_order().expect("automaton node rules are acyclic");
        let mut sets: Vec<FixedBitSet> = vec![FixedBitSet::new(); t.len()];
        for n in t.nodes().rev() {
            let children = t.children(n);
            let mut atom = |quant: Quant, axis: &Axis, q: usize| {
                let mut hit = children.iter().filter(|&&c| axis.matches(t.label(c).unwrap()));
                match quant {
                    Quant::Exists => hit.any(|&c| sets[c.index()].contains(q)),
                    Quant::Forall => hit.all(|&c| sets[c.index()].contains(q)),
                }
            };
            let s = self.node_states(&order, &TreeNode { tree: t, n }, &mut atom);
            sets[n.index()] = s;
        }
        sets
    }
}

pub fn automaton_accepts(a: &JAutomaton, t: &JsonTree) -> bool {
    let sets = a.run(t);
    a.accepts_states(&sets[t.root().index()])
}

/// Dualizes every rule. The result accepts exactly the trees the input
/// rejects; several final states are first merged into a fresh conjunction
/// state, and an automaton without final states gets an always-true one.
pub fn complement(a: &JAutomaton) -> JAutomaton {
    let mut out = a.clone();
    out.dualize_range(0..a.state_count(), &|q| q);
    match a.finals.len() {
        1 => {}
        0 => {
            let q = out.add_node_state(NodeRule::True);
            out.finals = vec![q];
        }
        _ => {
            let q = out.add_node_state(NodeRule::And(a.finals.iter().map(|&f| NodeRule::State(f)).collect()));
            out.finals = vec![q];
        }
    }
    out
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Key(e) => match e.as_word() {
                Some(w) => f.write_str(&crate::syntax::quote(w)),
                None => write!(f, "/{e}/"),
            },
            Axis::Idx(i, Some(j)) if i == j => write!(f, "{i}"),
            Axis::Idx(i, Some(j)) => write!(f, "{i}:{j}"),
            Axis::Idx(i, None) => write!(f, "{i}:*"),
        }
    }
}

fn join<T>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str, each: impl Fn(&mut fmt::Formatter<'_>, &T) -> fmt::Result) -> fmt::Result {
    f.write_str("(")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        each(f, x)?;
    }
    f.write_str(")")
}

impl fmt::Display for NodeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRule::True => f.write_str("true"),
            NodeRule::False => f.write_str("false"),
            NodeRule::State(q) => write!(f, "q{q}"),
            NodeRule::Test(t) => write!(f, "{t}"),
            NodeRule::NotTest(t) => write!(f, "!{t}"),
            NodeRule::And(rs) => join(f, rs, " && ", |f, r| write!(f, "{r}")),
            NodeRule::Or(rs) => join(f, rs, " || ", |f, r| write!(f, "{r}")),
        }
    }
}

impl fmt::Display for TreeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeRule::True => f.write_str("true"),
            TreeRule::False => f.write_str("false"),
            TreeRule::Atom(Quant::Exists, axis, q) => write!(f, "q{q} exists({axis})"),
            TreeRule::Atom(Quant::Forall, axis, q) => write!(f, "q{q} forall({axis})"),
            TreeRule::And(rs) => join(f, rs, " && ", |f, r| write!(f, "{r}")),
            TreeRule::Or(rs) => join(f, rs, " || ", |f, r| write!(f, "{r}")),
        }
    }
}

impl fmt::Display for JAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trees = (0..self.rules.len()).filter(|&q| self.is_tree_state(q)).count();
        writeln!(f, "states: {} ({} node, {} tree)", self.rules.len(), self.rules.len() - trees, trees)?;
        let finals: Vec<String> = self.finals.iter().map(|q| format!("q{q}")).collect();
        writeln!(f, "final: {}", finals.join(", "))?;
        for (q, r) in self.rules.iter().enumerate() {
            match r {
                Rule::Node(r) => writeln!(f, "  node q{q} <- {r}")?,
                Rule::Tree(r) => writeln!(f, "  tree q{q} <- {r}")?,
            }
        }
        Ok(())
    }
}
