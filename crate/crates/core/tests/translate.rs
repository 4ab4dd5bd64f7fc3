mod common;

use common::*;
use jsonlogic::jnl::{eval_unary, parse_jnl};
use jsonlogic::jsl::eval_set;
use jsonlogic::recursive::eval_recursive;
use jsonlogic::translate::{jnl_to_jsl, jnl_to_rjsl, jsl_to_jnl, TranslateError};
use proptest::prelude::*;

const PLAIN: JnlShape = JnlShape { star: false, eq_paths: false };

#[test]
fn fragments_are_enforced() {
    let eq = parse_jnl(r#"eq(@"a", @"b")"#).unwrap();
    assert!(matches!(jnl_to_jsl(&eq), Err(TranslateError::FragmentViolation(_))));
    assert!(jnl_to_rjsl(&eq).is_err());
    assert!(jsl_to_jnl(&jsonlogic::jsl::parse_jsl("dia(1) str").unwrap()).is_err());
}

proptest! {
    #[test]
    fn jnl_to_jsl_keeps_nodes(seed: u64) {
        let mut r = rng(seed);
        let phi = random_jnl(&mut r, 4, PLAIN);
        let psi = jnl_to_jsl(&phi).unwrap();
        for _ in 0..4 {
            let t = random_tree(&mut r, 4, 15);
            prop_assert_eq!(eval_unary(&t, &phi), eval_set(&t, &psi).unwrap(), "{} vs {}", phi, psi);
        }
    }

    #[test]
    fn jsl_to_jnl_keeps_nodes(seed: u64) {
        let mut r = rng(seed);
        let phi = random_jsl(&mut r, 4, true);
        let psi = jsl_to_jnl(&phi).unwrap();
        for _ in 0..4 {
            let t = random_tree(&mut r, 4, 15);
            prop_assert_eq!(eval_set(&t, &phi).unwrap(), eval_unary(&t, &psi), "{} vs {}", phi, psi);
        }
    }

    #[test]
    fn star_becomes_recursion(seed: u64) {
        let mut r = rng(seed);
        let phi = random_jnl(&mut r, 4, JnlShape { star: true, eq_paths: false });
        let e = jnl_to_rjsl(&phi).unwrap();
        for _ in 0..4 {
            let t = random_tree(&mut r, 4, 15);
            prop_assert_eq!(eval_unary(&t, &phi).contains(t.root()), eval_recursive(&e, &t).unwrap(), "{} vs {}", phi, e);
        }
    }
}
