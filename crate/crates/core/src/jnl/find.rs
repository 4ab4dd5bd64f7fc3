use thiserror::Error;

use super::{JnlBinary, JnlUnary};
use crate::tree::{subtree_at, JsonTree, NodeIx, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FindError {
    #[error("unsupported operator `{0}`")]
    UnsupportedOperator(String),
    #[error("malformed filter: {0}")]
    Malformed(String),
}

/// Compiles a find-style filter into a JNL formula.
///
/// Supported: `{path: value}`, `{path: {"$eq": value}}`, `{"$and": [..]}`,
/// `{"$or": [..]}`, `{"$not": filter}`. A path is a key, or several keys
/// joined by dots; the members of one object are conjoined.
pub fn compile_find_filter(filter: &JsonTree) -> Result<JnlUnary, FindError> {
    compile(filter, filter.root())
}

fn compile(t: &JsonTree, n: NodeIx) -> Result<JnlUnary, FindError> {
    if t.kind(n) != NodeKind::Obj {
        return Err(FindError::Malformed(format!("expected an object, found {}", crate::tree::serialize(t, n))));
    }
    let mut parts = Vec::new();
    for &c in t.children(n) {
        let key = t.key(c).unwrap();
        parts.push(match key {
            "$and" => JnlUnary::all(list(t, c, key)?),
            "$or" => JnlUnary::any(list(t, c, key)?),
            "$not" => JnlUnary::not(compile(t, c)?),
            op if op.starts_with('$') => return Err(FindError::UnsupportedOperator(op.to_string())),
            path => condition(t, path, c)?,
        });
    }
    Ok(JnlUnary::all(parts))
}

fn list(t: &JsonTree, n: NodeIx, op: &str) -> Result<Vec<JnlUnary>, FindError> {
    if t.kind(n) != NodeKind::Arr {
        return Err(FindError::Malformed(format!("`{op}` expects an array")));
    }
    t.children(n).iter().map(|&c| compile(t, c)).collect()
}

fn condition(t: &JsonTree, path: &str, value: NodeIx) -> Result<JnlUnary, FindError> {
    let nav = path
        .split('.')
        .map(|k| JnlBinary::Key(k.to_string()))
        .reduce(JnlBinary::compose)
        .expect("split yields at least one segment");
    // an object whose keys are all operators is an operator document
    let is_operator_doc = t.kind(value) == NodeKind::Obj
        && !t.children(value).is_empty()
        && t.children(value).iter().all(|&c| t.key(c).unwrap().starts_with('$'));
    if !is_operator_doc {
        return Ok(JnlUnary::EqConst(nav, subtree_at(t, value)));
    }
    let mut parts = Vec::new();
    for &c in t.children(value) {
        match t.key(c).unwrap() {
            "$eq" => parts.push(JnlUnary::EqConst(nav.clone(), subtree_at(t, c))),
            op => return Err(FindError::UnsupportedOperator(op.to_string())),
        }
    }
    Ok(JnlUnary::all(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jnl::parse_jnl;
    use crate::tree::parse_document;

    fn compile_text(s: &str) -> Result<JnlUnary, FindError> {
        compile_find_filter(&parse_document(s).unwrap())
    }

    #[test]
    fn equality_filter() {
        assert_eq!(
            compile_text(r#"{"name":{"$eq":"Sue"}}"#).unwrap(),
            parse_jnl(r#"eq(@"name", "Sue")"#).unwrap()
        );
        assert_eq!(compile_text(r#"{"$and":[]}"#).unwrap(), JnlUnary::Top);
        assert_eq!(compile_text("{}").unwrap(), JnlUnary::Top);
        assert_eq!(
            compile_text(r#"{"name.first":"Sue","age":3}"#).unwrap(),
            parse_jnl(r#"eq(@"age", 3) && eq(@"name" / @"first", "Sue")"#).unwrap()
        );
    }

    #[test]
    fn operators() {
        assert_eq!(
            compile_text(r#"{"age":{"$gt":3}}"#),
            Err(FindError::UnsupportedOperator("$gt".into()))
        );
        assert_eq!(compile_text(r#"{"$where":"x"}"#), Err(FindError::UnsupportedOperator("$where".into())));
        assert_eq!(
            compile_text(r#"{"$or":[{"a":1},{"$not":{"b":2}}]}"#).unwrap(),
            parse_jnl(r#"eq(@"a", 1) || !eq(@"b", 2)"#).unwrap()
        );
        assert!(matches!(compile_text(r#"{"$and":{}}"#), Err(FindError::Malformed(_))));
    }
}
