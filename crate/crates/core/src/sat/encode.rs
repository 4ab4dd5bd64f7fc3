use std::collections::BTreeSet;

use crate::jnl::{JnlBinary, JnlUnary};
use crate::jsl::JslFormula;
use crate::regex::Pattern;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: String,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: &str) -> Self {
        Literal { var: var.to_string(), negated: false }
    }

    pub fn neg(var: &str) -> Self {
        Literal { var: var.to_string(), negated: true }
    }
}

/// A propositional formula in CNF is satisfiable iff the encoding is. The
/// value under key `p` is an array when `p` is true and an object with key
/// `w` (renamed if a variable is called `w`) when it is false.
pub fn encode_3sat(clauses: &[Vec<Literal>]) -> JnlUnary {
    let vars: BTreeSet<&str> = clauses.iter().flatten().map(|l| l.var.as_str()).collect();
    let w = (0..).map(|i| if i == 0 { "w".to_string() } else { format!("w{i}") }).find(|w| !vars.contains(w.as_str())).unwrap();
    let truth = |p: &str, value: bool| {
        let below = if value { JnlBinary::Idx(1) } else { JnlBinary::Key(w.clone()) };
        JnlUnary::Exists(JnlBinary::compose(JnlBinary::Key(p.to_string()), below))
    };
    let theta = vars.iter().map(|p| JnlUnary::or(truth(p, true), truth(p, false)));
    let gamma = clauses.iter().map(|c| JnlUnary::any(c.iter().map(|l| truth(&l.var, !l.negated))));
    JnlUnary::all(theta.chain(gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// `Q1 x1 ... Qn xn` followed by a CNF matrix over `x1..xn`; literals name
/// variables by their 1-based position in the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qbf {
    pub prefix: Vec<Quantifier>,
    pub clauses: Vec<Vec<(usize, bool)>>,
}

impl Qbf {
    /// Brute force over the quantifier prefix.
    pub fn eval(&self) -> bool {
        fn go(q: &Qbf, k: usize, val: &mut Vec<bool>) -> bool {
            if k == q.prefix.len() {
                return q.clauses.iter().all(|c| c.iter().any(|&(v, neg)| val[v - 1] != neg));
            }
            let branch = |b: bool, val: &mut Vec<bool>| {
                val.push(b);
                let r = go(q, k + 1, val);
                val.pop();
                r
            };
            match q.prefix[k] {
                Quantifier::Exists => branch(false, val) || branch(true, val),
                Quantifier::Forall => branch(false, val) && branch(true, val),
            }
        }
        go(self, 0, &mut Vec::new())
    }
}

fn key(w: &str) -> Pattern {
    Pattern::word(w)
}

fn boxes(n: usize, inner: JslFormula) -> JslFormula {
    (0..n).fold(inner, |f, _| JslFormula::box_key(Pattern::sigma_star(), f))
}

fn dia(w: &str) -> JslFormula {
    JslFormula::dia_key(key(w), JslFormula::True)
}

/// A JSL formula satisfiable iff the QBF is true. Models are object trees
/// of height `2n`: the node reached after `k - 1` rounds has a single `X`
/// child, below which an existential variable picks one of `T` and `F` and
/// a universal variable has both. Every clause then forbids a root path
/// whose choices falsify it.
pub fn encode_qbf(qbf: &Qbf) -> JslFormula {
    let n = qbf.prefix.len();
    let mut parts = vec![dia("X")];
    for (k, q) in qbf.prefix.iter().enumerate() {
        let choice = match q {
            Quantifier::Exists => JslFormula::or(
                JslFormula::and(dia("T"), JslFormula::not(dia("F"))),
                JslFormula::and(JslFormula::not(dia("T")), dia("F")),
            ),
            Quantifier::Forall => JslFormula::and(dia("T"), dia("F")),
        };
        parts.push(boxes(2 * k, JslFormula::box_key(key("X"), choice)));
        if k + 1 < n {
            let next = JslFormula::and(
                JslFormula::box_key(key("T"), dia("X")),
                JslFormula::box_key(key("F"), dia("X")),
            );
            parts.push(boxes(2 * k + 1, next));
        }
    }
    for clause in &qbf.clauses {
        let pos: BTreeSet<usize> = clause.iter().filter(|c| !c.1).map(|c| c.0).collect();
        let neg: BTreeSet<usize> = clause.iter().filter(|c| c.1).map(|c| c.0).collect();
        if pos.intersection(&neg).next().is_some() {
            continue;
        }
        let last = clause.iter().map(|c| c.0).max().unwrap_or(0);
        // a falsifying path takes F below positive and T below negated variables
        let mut path = JslFormula::True;
        for l in (1..=last).rev() {
            let label = if pos.contains(&l) {
                key("F")
            } else if neg.contains(&l) {
                key("T")
            } else {
                Pattern::sigma_star()
            };
            path = JslFormula::dia_key(key("X"), JslFormula::dia_key(label, path));
        }
        parts.push(JslFormula::not(path));
    }
    JslFormula::all(parts)
}
