mod common;

use common::*;
use jsonlogic::jsl::validate;
use jsonlogic::recursive::eval_recursive;
use jsonlogic::schema::{jsl_to_schema, parse_schema, rjsl_to_schema, schema_to_jsl, validate_schema, Compiled, SchemaError};
use jsonlogic::parse_document;
use proptest::prelude::*;

fn accepts(text: &str, doc: &str) -> bool {
    validate_schema(&parse_document(doc).unwrap(), &parse_schema(text).unwrap()).unwrap()
}

#[test]
fn keyword_semantics() {
    let items = r#"{"type":"array","items":[{"type":"number"},{"type":"string"}]}"#;
    assert!(accepts(items, r#"[1,"x"]"#));
    assert!(!accepts(items, r#"[1]"#));
    assert!(!accepts(items, r#"[1,"x",2]"#));
    let extra = r#"{"type":"array","items":[{"type":"number"}],"additionalItems":{"type":"string"}}"#;
    assert!(accepts(extra, r#"[1,"x","y"]"#));
    assert!(!accepts(extra, r#"[1,"x",2]"#));
    let props = r#"{"type":"object","properties":{"a":{"type":"number"}},"patternProperties":{"a|b":{"minimum":1,"type":"number"}},"additionalProperties":false}"#;
    assert!(accepts(props, r#"{"a":1,"b":3}"#));
    assert!(!accepts(props, r#"{"a":0}"#));
    assert!(!accepts(props, r#"{"c":1}"#));
    assert!(accepts(r#"{"enum":[{"a":[1]},"x"]}"#, r#"{"a":[1]}"#));
    assert!(!accepts(r#"{"type":"string"}"#, "1"));
    assert!(accepts(r#"{"not":{"type":"number","multipleOf":2}}"#, "3"));
}

#[test]
fn malformed_schemas() {
    assert!(matches!(parse_schema(r#"{"minimum":1}"#), Err(SchemaError::TypeMismatch(_))));
    assert!(matches!(parse_schema(r#"{"type":"string","format":"x"}"#), Err(SchemaError::UnknownKeyword(_))));
    assert!(matches!(parse_schema(r##"{"$ref":"#/definitions/none"}"##), Err(SchemaError::UnresolvableRef(_))));
    assert!(parse_schema("{").is_err());
}

#[test]
fn corpus_covers_every_keyword() {
    let seen: Vec<String> = SCHEMA_CORPUS.iter().flat_map(|s| keywords_in(s)).collect();
    for k in TABLE_KEYWORDS {
        assert!(seen.iter().any(|s| s == k), "{k}");
    }
}

proptest! {
    #[test]
    fn compilers_agree_with_the_validator(seed: u64, which in 0..SCHEMA_CORPUS.len()) {
        let s = parse_schema(SCHEMA_CORPUS[which]).unwrap();
        let compiled = schema_to_jsl(&s).unwrap();
        let back = match &compiled {
            Compiled::Plain(phi) => jsl_to_schema(phi).unwrap(),
            Compiled::Recursive(e) => rjsl_to_schema(e).unwrap(),
        };
        let t = random_schema_doc(&mut rng(seed));
        let direct = validate_schema(&t, &s).unwrap();
        let via = match &compiled {
            Compiled::Plain(phi) => validate(&t, phi),
            Compiled::Recursive(e) => eval_recursive(e, &t).unwrap(),
        };
        prop_assert_eq!(direct, via);
        prop_assert_eq!(direct, validate_schema(&t, &back).unwrap());
    }

    #[test]
    fn random_formulas_survive_the_round_trip(seed: u64) {
        let mut r = rng(seed);
        let phi = random_jsl(&mut r, 3, false);
        let s = jsl_to_schema(&phi).unwrap();
        for _ in 0..4 {
            let t = random_tree(&mut r, 4, 15);
            prop_assert_eq!(validate(&t, &phi), validate_schema(&t, &s).unwrap(), "{}", phi);
        }
    }
}
