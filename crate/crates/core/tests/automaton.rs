mod common;

use common::*;
use jsonlogic::automaton::{
    automaton_accepts, complement, jnl_to_automaton, jsl_to_automaton, recursive_to_automaton, AutomatonError,
    JAutomaton, NodeRule, Rule,
};
use jsonlogic::jnl::eval_unary;
use jsonlogic::jsl::validate;
use jsonlogic::recursive::eval_recursive;
use proptest::prelude::*;

#[test]
fn cyclic_node_rules_are_reported() {
    let mut a = JAutomaton::new();
    let p = a.add_node_state(NodeRule::True);
    let q = a.add_node_state(NodeRule::State(p));
    a.set_rule(p, Rule::Node(NodeRule::State(q)));
    a.set_finals(vec![q]);
    assert!(matches!(a.check_acyclic(), Err(AutomatonError::CyclicNodeRules(_))));
}

proptest! {
    #[test]
    fn formulas(seed: u64) {
        let mut r = rng(seed);
        let phi = random_jsl(&mut r, 4, false);
        let a = jsl_to_automaton(&phi);
        prop_assert!(a.check_acyclic().is_ok());
        for _ in 0..4 {
            let t = random_tree(&mut r, 4, 15);
            prop_assert_eq!(automaton_accepts(&a, &t), validate(&t, &phi), "{}", phi);
        }
    }

    #[test]
    fn recursive_expressions(seed: u64) {
        let mut r = rng(seed);
        let e = random_rjsl(&mut r);
        let a = recursive_to_automaton(&e).unwrap();
        prop_assert!(a.check_acyclic().is_ok());
        for _ in 0..4 {
            let t = random_tree(&mut r, 4, 15);
            prop_assert_eq!(automaton_accepts(&a, &t), eval_recursive(&e, &t).unwrap(), "{}", e);
        }
    }

    #[test]
    fn navigational_formulas(seed: u64) {
        let mut r = rng(seed);
        let phi = random_jnl(&mut r, 4, JnlShape { star: true, eq_paths: false });
        let a = jnl_to_automaton(&phi).unwrap();
        for _ in 0..4 {
            let t = random_tree(&mut r, 4, 15);
            prop_assert_eq!(automaton_accepts(&a, &t), eval_unary(&t, &phi).contains(t.root()), "{}", phi);
        }
    }

    #[test]
    fn complement_flips_and_restores(seed: u64) {
        let mut r = rng(seed);
        let a = recursive_to_automaton(&random_rjsl(&mut r)).unwrap();
        let once = complement(&a);
        let twice = complement(&once);
        prop_assert!(once.check_acyclic().is_ok());
        for _ in 0..4 {
            let t = random_tree(&mut r, 4, 15);
            let base = automaton_accepts(&a, &t);
            prop_assert_eq!(automaton_accepts(&once, &t), !base);
            prop_assert_eq!(automaton_accepts(&twice, &t), base);
        }
    }
}
