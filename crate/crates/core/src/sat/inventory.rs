use std::collections::BTreeSet;

use super::SatInput;
use crate::jnl::{JnlBinary, JnlUnary};
use crate::jsl::{JslFormula, NodeTest};
use crate::regex::{enumerate_words, Pattern};
use crate::tree::{Atom, JsonTree};

/// The finite alphabet candidate trees are built from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Inventory {
    pub keys: Vec<String>,
    pub strings: Vec<String>,
    pub ints: Vec<u64>,
}

#[derive(Default)]
struct Collect {
    key_patterns: Vec<Pattern>,
    string_patterns: Vec<Pattern>,
    int_constants: BTreeSet<u64>,
    constants: Vec<JsonTree>,
}

impl Collect {
    fn of(input: &SatInput) -> Collect {
        let mut c = Collect::default();
        match input {
            SatInput::Jnl(phi) => c.jnl(phi),
            SatInput::Jsl(phi) => c.jsl(phi),
            SatInput::Rjsl(e) => {
                c.jsl(&e.base);
                for (_, body) in &e.definitions {
                    c.jsl(body);
                }
            }
        }
        c
    }

    fn jsl(&mut self, phi: &JslFormula) {
        match phi {
            JslFormula::True | JslFormula::Var(_) => {}
            JslFormula::Not(a) => self.jsl(a),
            JslFormula::And(a, b) | JslFormula::Or(a, b) => {
                self.jsl(a);
                self.jsl(b);
            }
            JslFormula::Test(t) => match t {
                NodeTest::Pattern(e) => self.string_patterns.push(e.clone()),
                NodeTest::Min(c) | NodeTest::Max(c) | NodeTest::MultOf(c) => {
                    self.int_constants.insert(*c);
                }
                NodeTest::SameAs(c) => self.constants.push(c.clone()),
                _ => {}
            },
            JslFormula::BoxKey(e, a) | JslFormula::DiaKey(e, a) => {
                self.key_patterns.push(e.clone());
                self.jsl(a);
            }
            JslFormula::BoxIdx(_, _, a) | JslFormula::DiaIdx(_, _, a) => self.jsl(a),
        }
    }

    fn jnl(&mut self, phi: &JnlUnary) {
        match phi {
            JnlUnary::Top => {}
            JnlUnary::Not(a) => self.jnl(a),
            JnlUnary::And(a, b) | JnlUnary::Or(a, b) => {
                self.jnl(a);
                self.jnl(b);
            }
            JnlUnary::Exists(a) => self.path(a),
            JnlUnary::EqConst(a, c) => {
                self.path(a);
                self.constants.push(c.clone());
            }
            JnlUnary::EqPaths(a, b) => {
                self.path(a);
                self.path(b);
            }
        }
    }

    fn path(&mut self, alpha: &JnlBinary) {
        match alpha {
            JnlBinary::Test(phi) => self.jnl(phi),
            JnlBinary::Key(w) => self.key_patterns.push(Pattern::word(w)),
            JnlBinary::KeyRegex(e) => self.key_patterns.push(e.clone()),
            JnlBinary::Compose(a, b) => {
                self.path(a);
                self.path(b);
            }
            JnlBinary::Star(a) => self.path(a),
            JnlBinary::Idx(_) | JnlBinary::IdxRange(..) | JnlBinary::Eps => {}
        }
    }
}

fn words(patterns: &[Pattern], max_atoms: usize, out: &mut BTreeSet<String>) {
    for e in patterns {
        match e.as_word() {
            Some(w) => {
                out.insert(w.to_string());
            }
            None => out.extend(enumerate_words(e.regex(), max_atoms, max_atoms)),
        }
    }
}

/// A word outside `taken`, avoiding the patterns when possible.
fn fresh(prefix: &str, taken: &BTreeSet<String>, patterns: &[Pattern]) -> String {
    let candidates = std::iter::once(prefix.to_string())
        .chain(('a'..='z').map(String::from))
        .chain((1..).map(|i| format!("{prefix}{i}")));
    let mut first_free = None;
    for w in candidates.take(1000) {
        if taken.contains(&w) {
            continue;
        }
        if !patterns.iter().any(|e| e.matches(&w)) {
            return w;
        }
        first_free.get_or_insert(w);
    }
    first_free.unwrap_or_else(|| (1000..).map(|i| format!("{prefix}{i}")).find(|w| !taken.contains(w)).unwrap())
}

impl Inventory {
    /// Keys and strings named by the formula or enumerated from its
    /// patterns, plus one fresh key and one fresh string; the numeric
    /// constants, their neighbours and 0. Everything occurring inside
    /// constant documents is included.
    pub fn collect(input: &SatInput, max_atoms: usize) -> Inventory {
        let c = Collect::of(input);
        let mut keys = BTreeSet::new();
        let mut strings = BTreeSet::new();
        let mut ints = BTreeSet::from([0u64]);
        words(&c.key_patterns, max_atoms, &mut keys);
        words(&c.string_patterns, max_atoms, &mut strings);
        for &k in &c.int_constants {
            ints.insert(k);
            ints.insert(k.saturating_add(1));
            ints.insert(k.saturating_sub(1));
        }
        for t in &c.constants {
            for n in t.nodes() {
                if let Some(k) = t.key(n) {
                    keys.insert(k.to_string());
                }
                match t.atom(n) {
                    Some(Atom::Str(s)) => {
                        strings.insert(s.clone());
                    }
                    Some(Atom::Int(i)) => {
                        ints.insert(*i);
                    }
                    None => {}
                }
            }
        }
        keys.insert(fresh("k", &keys, &c.key_patterns));
        strings.insert(fresh("s", &strings, &c.string_patterns));
        Inventory { keys: keys.into_iter().collect(), strings: strings.into_iter().collect(), ints: ints.into_iter().collect() }
    }

    pub fn atom_count(&self) -> usize {
        self.keys.len() + self.strings.len() + self.ints.len()
    }
}

/// Every subtree of every constant, without repetition.
pub(crate) fn constant_subtrees(input: &SatInput) -> Vec<JsonTree> {
    let c = Collect::of(input);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in &c.constants {
        for n in t.nodes() {
            let sub = crate::tree::subtree_at(t, n);
            if seen.insert(sub.canonical().to_string()) {
                out.push(sub);
            }
        }
    }
    out
}
