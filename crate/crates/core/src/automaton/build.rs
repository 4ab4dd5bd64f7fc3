use std::collections::HashMap;

use super::{Axis, JAutomaton, NodeRule, Quant, Rule, TreeRule};
use crate::jnl::JnlUnary;
use crate::jsl::JslFormula;
use crate::recursive::{precedence_graph, RecursiveError, RecursiveJsl};
use crate::translate::{jnl_to_rjsl, TranslateError};

struct Builder {
    a: JAutomaton,
    /// Positive and dual state of each definition symbol.
    defs: HashMap<String, (usize, usize)>,
}

impl Builder {
    fn swap(&self) -> HashMap<usize, usize> {
        let mut m = HashMap::new();
        for &(p, n) in self.defs.values() {
            m.insert(p, n);
            m.insert(n, p);
        }
        m
    }

    /// Adds states for `phi` and returns the one accepting exactly where
    /// `phi` holds.
    fn build(&mut self, phi: &JslFormula) -> usize {
        match phi {
            JslFormula::True => self.a.add_node_state(NodeRule::True),
            JslFormula::Test(t) => self.a.add_node_state(NodeRule::Test(t.clone())),
            JslFormula::Not(inner) => {
                let start = self.a.state_count();
                let f = self.build(inner);
                let swap = self.swap();
                let map = |q: usize| if q >= start { q } else { swap.get(&q).copied().unwrap_or(q) };
                self.a.dualize_range(start..self.a.state_count(), &map);
                if f >= start {
                    f
                } else {
                    map(f)
                }
            }
            JslFormula::And(l, r) => {
                let (l, r) = (self.build(l), self.build(r));
                self.a.add_node_state(NodeRule::And(vec![NodeRule::State(l), NodeRule::State(r)]))
            }
            JslFormula::Or(l, r) => {
                let (l, r) = (self.build(l), self.build(r));
                self.a.add_node_state(NodeRule::Or(vec![NodeRule::State(l), NodeRule::State(r)]))
            }
            JslFormula::BoxKey(e, inner) => self.quant(Quant::Forall, Axis::Key(e.clone()), inner),
            JslFormula::DiaKey(e, inner) => self.quant(Quant::Exists, Axis::Key(e.clone()), inner),
            JslFormula::BoxIdx(i, j, inner) => self.quant(Quant::Forall, Axis::Idx(*i, *j), inner),
            JslFormula::DiaIdx(i, j, inner) => self.quant(Quant::Exists, Axis::Idx(*i, *j), inner),
            JslFormula::Var(v) => match self.defs.get(v) {
                Some(&(p, _)) => p,
                None => self.a.add_node_state(NodeRule::False),
            },
        }
    }

    fn quant(&mut self, quant: Quant, axis: Axis, inner: &JslFormula) -> usize {
        let q = self.build(inner);
        let t = self.a.add_tree_state(TreeRule::Atom(quant, axis, q));
        self.a.add_node_state(NodeRule::State(t))
    }
}

/// Automaton accepting the trees whose root satisfies `phi`. Symbols are
/// read as false.
pub fn jsl_to_automaton(phi: &JslFormula) -> JAutomaton {
    let mut b = Builder { a: JAutomaton::new(), defs: HashMap::new() };
    let f = b.build(phi);
    b.a.set_finals(vec![f]);
    b.a
}

pub fn recursive_to_automaton(expr: &RecursiveJsl) -> Result<JAutomaton, RecursiveError> {
    expr.check_symbols()?;
    if let Some(cycle) = precedence_graph(expr).find_cycle() {
        return Err(RecursiveError::IllFormed(cycle));
    }
    let mut b = Builder { a: JAutomaton::new(), defs: HashMap::new() };
    for (name, _) in &expr.definitions {
        let p = b.a.add_node_state(NodeRule::False);
        let n = b.a.add_node_state(NodeRule::True);
        b.defs.insert(name.clone(), (p, n));
    }
    for (name, body) in &expr.definitions {
        let (p, n) = b.defs[name];
        let f = b.build(body);
        b.a.set_rule(p, Rule::Node(NodeRule::State(f)));
        let g = b.build(&JslFormula::not(body.clone()));
        b.a.set_rule(n, Rule::Node(NodeRule::State(g)));
    }
    let f = b.build(&expr.base);
    b.a.set_finals(vec![f]);
    debug_assert!(b.a.check_acyclic().is_ok());
    Ok(b.a)
}

/// Path equality is outside the reach of the construction.
pub fn jnl_to_automaton(phi: &JnlUnary) -> Result<JAutomaton, TranslateError> {
    let expr = jnl_to_rjsl(phi)?;
    Ok(recursive_to_automaton(&expr).expect("star translation yields well-formed definitions"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{automaton_accepts, complement};
    use crate::jnl::{eval_unary, parse_jnl};
    use crate::jsl::{parse_jsl, validate};
    use crate::recursive::{eval_recursive, even_path_expr, parse_rjsl};
    use crate::tree::parse_document;

    const DOCS: &[&str] = &[
        "1",
        "7",
        r#""ab""#,
        "{}",
        "[]",
        r#"{"a":1,"b":[1,2]}"#,
        r#"[1,1,{"a":"x"}]"#,
        r#"{"a":{"a":{"b":2}}}"#,
        r#"[[1],[1,[2]],"x"]"#,
        r#"{"a":{"b":{}},"b":{"a":{"a":{}}}}"#,
    ];

    #[test]
    fn matches_jsl_semantics() {
        for f in [
            "true",
            "int && min(2)",
            r#"!dia("a") true"#,
            r#"box(/.*/) (int || obj)"#,
            "arr && !unique && dia(2:*) arr",
            r#"!(box(1:*) int && !dia("a") !obj)"#,
            r#"dia("a") dia("a") !box("b") false"#,
            "same(7) || dia(3) same({\"a\":\"x\"})",
        ] {
            let phi = parse_jsl(f).unwrap();
            let a = jsl_to_automaton(&phi);
            let c = complement(&a);
            for d in DOCS {
                let t = parse_document(d).unwrap();
                let want = validate(&t, &phi);
                assert_eq!(automaton_accepts(&a, &t), want, "{f} on {d}");
                assert_eq!(automaton_accepts(&c, &t), !want, "complement of {f} on {d}");
            }
        }
    }

    #[test]
    fn recursive_definitions() {
        let even = even_path_expr();
        let a = recursive_to_automaton(&even).unwrap();
        let neg = parse_rjsl("let g1 = box(/.*/) g2; let g2 = dia(/.*/) true && box(/.*/) g1; in !g1 && obj").unwrap();
        let an = recursive_to_automaton(&neg).unwrap();
        for d in DOCS {
            let t = parse_document(d).unwrap();
            assert_eq!(automaton_accepts(&a, &t), eval_recursive(&even, &t).unwrap(), "{d}");
            assert_eq!(automaton_accepts(&an, &t), eval_recursive(&neg, &t).unwrap(), "{d}");
        }
        let bad = parse_rjsl("let a = !a; in a").unwrap();
        assert!(matches!(recursive_to_automaton(&bad), Err(RecursiveError::IllFormed(_))));
    }

    #[test]
    fn jnl_with_star() {
        for f in [
            r#"[(@"a")* / @"b"]"#,
            r#"eq((@/.*/)* , 2)"#,
            r#"![(@/.*/ / @/.*/)* / test(![@/.*/])]"#,
            r#"[(#1:* / test([@"a"]))* / @"b" / test(eq(eps, 2))]"#,
            r#"[((@"a")* / #1)*]"#,
        ] {
            let phi = parse_jnl(f).unwrap();
            let a = jnl_to_automaton(&phi).unwrap();
            for d in DOCS {
                let t = parse_document(d).unwrap();
                assert_eq!(automaton_accepts(&a, &t), eval_unary(&t, &phi).contains(t.root()), "{f} on {d}");
            }
        }
        assert!(jnl_to_automaton(&parse_jnl(r#"eq(@"a", @"b")"#).unwrap()).is_err());
    }
}
