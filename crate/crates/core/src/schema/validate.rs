use std::collections::HashMap;

use super::{Schema, SchemaDocument, SchemaError};
use crate::tree::{subtree_eq, JsonTree, NodeIx, NodeKind};

/// Rejects definitions that can reach themselves without descending into a
/// child node.
pub fn check_well_formed(doc: &SchemaDocument) -> Result<(), SchemaError> {
    let names: Vec<&String> = doc.definitions.keys().collect();
    let idx: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut adj = vec![Vec::new(); names.len()];
    for (i, body) in doc.definitions.values().enumerate() {
        body.visit_refs(false, &mut |name, guarded| {
            if !guarded {
                if let Some(&j) = idx.get(name) {
                    adj[i].push(j);
                }
            }
        });
    }
    let mut color = vec![0u8; names.len()];
    let mut stack = Vec::new();
    fn dfs(v: usize, adj: &[Vec<usize>], color: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        color[v] = 1;
        stack.push(v);
        for &w in &adj[v] {
            if color[w] == 1 {
                let at = stack.iter().position(|&x| x == w).unwrap();
                let mut c = stack[at..].to_vec();
                c.push(w);
                return Some(c);
            }
            if color[w] == 0 {
                if let Some(c) = dfs(w, adj, color, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        color[v] = 2;
        None
    }
    for v in 0..names.len() {
        if color[v] == 0 {
            if let Some(c) = dfs(v, &adj, &mut color, &mut stack) {
                return Err(SchemaError::IllFormedRecursion(c.into_iter().map(|i| names[i].clone()).collect()));
            }
        }
    }
    Ok(())
}

/// Validates the document root against the schema by direct
/// interpretation of the keywords.
pub fn validate_schema(t: &JsonTree, doc: &SchemaDocument) -> Result<bool, SchemaError> {
    check_well_formed(doc)?;
    let mut v = Validator { t, doc, memo: HashMap::new() };
    Ok(v.check(&doc.root, t.root()))
}

struct Validator<'a> {
    t: &'a JsonTree,
    doc: &'a SchemaDocument,
    memo: HashMap<(&'a str, NodeIx), bool>,
}

impl<'a> Validator<'a> {
    fn check(&mut self, s: &'a Schema, n: NodeIx) -> bool {
        let t = self.t;
        match s {
            Schema::Empty => true,
            Schema::String { pattern } => {
                t.kind(n) == NodeKind::Str && pattern.as_ref().is_none_or(|p| p.matches(t.str_value(n).unwrap()))
            }
            Schema::Number { minimum, maximum, multiple_of } => {
                let Some(v) = t.int_value(n) else { return false };
                minimum.is_none_or(|m| v >= m)
                    && maximum.is_none_or(|m| v <= m)
                    && multiple_of.is_none_or(|k| if k == 0 { v == 0 } else { v % k == 0 })
            }
            Schema::Object {
                min_properties,
                max_properties,
                required,
                properties,
                pattern_properties,
                additional_properties,
            } => {
                if t.kind(n) != NodeKind::Obj {
                    return false;
                }
                let children = t.children(n);
                if min_properties.is_some_and(|i| children.len() < i)
                    || max_properties.is_some_and(|i| children.len() > i)
                    || required.iter().any(|k| t.child_by_key(n, k).is_none())
                {
                    return false;
                }
                for &c in children {
                    let key = t.key(c).unwrap();
                    let mut listed = false;
                    for (k, sub) in properties {
                        if k == key {
                            listed = true;
                            if !self.check(sub, c) {
                                return false;
                            }
                        }
                    }
                    for (e, sub) in pattern_properties {
                        if e.matches(key) {
                            listed = true;
                            if !self.check(sub, c) {
                                return false;
                            }
                        }
                    }
                    if !listed {
                        if let Some(sub) = additional_properties {
                            if !self.check(sub, c) {
                                return false;
                            }
                        }
                    }
                }
                true
            }
            Schema::Array { items, unique_items, additional_items } => {
                if t.kind(n) != NodeKind::Arr {
                    return false;
                }
                let children = t.children(n);
                let listed = items.as_ref().map_or(0, Vec::len);
                if children.len() < listed {
                    return false;
                }
                if items.is_some() && additional_items.is_none() && children.len() > listed {
                    return false;
                }
                if *unique_items {
                    for (i, &a) in children.iter().enumerate() {
                        if children[i + 1..].iter().any(|&b| subtree_eq(t, a, t, b)) {
                            return false;
                        }
                    }
                }
                for (pos, &c) in children.iter().enumerate() {
                    let sub = match items {
                        Some(items) if pos < items.len() => &items[pos],
                        _ => match additional_items {
                            Some(sub) => sub,
                            None => continue,
                        },
                    };
                    if !self.check(sub, c) {
                        return false;
                    }
                }
                true
            }
            Schema::AllOf(ss) => ss.iter().all(|s| self.check(s, n)),
            Schema::AnyOf(ss) => ss.iter().any(|s| self.check(s, n)),
            Schema::Not(s) => !self.check(s, n),
            Schema::Enum(docs) => docs.iter().any(|d| subtree_eq(t, n, d, d.root())),
            Schema::Ref(name) => {
                if let Some(&b) = self.memo.get(&(name.as_str(), n)) {
                    return b;
                }
                let body = &self.doc.definitions[name];
                let b = self.check(body, n);
                self.memo.insert((name.as_str(), n), b);
                b
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parse_schema;
    use crate::tree::parse_document;

    fn valid(schema: &str, doc: &str) -> bool {
        validate_schema(&parse_document(doc).unwrap(), &parse_schema(schema).unwrap()).unwrap()
    }

    #[test]
    fn number_schema() {
        let s = r##"{"type":"number","maximum":12,"multipleOf":4}"##;
        let accepted: Vec<u64> = (0..=20).filter(|i| valid(s, &i.to_string())).collect();
        assert_eq!(accepted, vec![0, 4, 8, 12]);
    }

    #[test]
    fn array_schema() {
        let s = r##"{"type":"array","items":[{"type":"string"},{"type":"string"}],
                    "additionalItems":{"type":"number"},"uniqueItems":true}"##;
        assert!(valid(s, r##"["a","b",3]"##));
        assert!(!valid(s, r##"["a","a",3]"##));
        assert!(!valid(s, r##"["a"]"##));
        assert!(!valid(s, r##"["a","b","c"]"##));
        let exact = r##"{"type":"array","items":[{},{}]}"##;
        assert!(valid(exact, "[1,2]"));
        assert!(!valid(exact, "[1,2,3]"));
        let all = r##"{"type":"array","additionalItems":{"type":"number"}}"##;
        assert!(valid(all, "[1,2,3]"));
        assert!(!valid(all, r##"[1,"x"]"##));
    }

    #[test]
    fn object_schema() {
        let s = r##"{"type":"object","properties":{"name":{"type":"string"}},
                    "patternProperties":{"a(b|c)a":{"type":"number","multipleOf":2}},
                    "additionalProperties":{"type":"number","minimum":1,"maximum":1}}"##;
        assert!(valid(s, r##"{"name":"x","aba":4,"age":1}"##));
        assert!(!valid(s, r##"{"name":"x","aba":3}"##));
        assert!(!valid(s, r##"{"age":2}"##));
        assert!(!valid(s, "[]"));
    }

    #[test]
    fn recursion() {
        let email = r##"{"definitions":{"email":{"type":"string","pattern":"[A-z]*@ciws\\.cl"}},
                        "not":{"$ref":"#/definitions/email"}}"##;
        assert!(!valid(email, r##""juan@ciws.cl""##));
        assert!(valid(email, r##""juan@gmail.com""##));
        let tree = r##"{"definitions":{"t":{"anyOf":[{"type":"number"},
                        {"type":"array","items":[{"$ref":"#/definitions/t"},{"$ref":"#/definitions/t"}]}]}},
                       "$ref":"#/definitions/t"}"##;
        assert!(valid(tree, "[[1,2],3]"));
        assert!(!valid(tree, "[[1],3]"));
        let bad = parse_schema(r##"{"definitions":{"a":{"not":{"$ref":"#/definitions/a"}}},"$ref":"#/definitions/a"}"##)
            .unwrap();
        assert!(matches!(
            validate_schema(&parse_document("1").unwrap(), &bad),
            Err(SchemaError::IllFormedRecursion(_))
        ));
    }
}
