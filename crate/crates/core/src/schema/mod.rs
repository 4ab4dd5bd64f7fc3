//! JSON Schema core fragment: parsing, direct validation and compilation to
//! and from JSL.
//!
//! Supported keywords: `type` (string, number, object, array), `pattern`,
//! `minimum`, `maximum`, `multipleOf`, `minProperties`, `maxProperties`,
//! `required`, `properties`, `patternProperties`, `additionalProperties`,
//! `items` (list form), `uniqueItems`, `additionalItems`, `allOf`, `anyOf`,
//! `not`, `enum`, plus `definitions` at the document root and
//! `$ref: "#/definitions/<name>"`.

mod compile;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::regex::{parse_regex, Pattern, RegexError};
use crate::tree::{parse_document, JsonTree};

pub use compile::{jsl_to_schema, jsl_to_schema_with_cap, rjsl_to_schema, schema_to_jsl, Compiled, DEFAULT_SCHEMA_CAP};
pub use validate::{check_well_formed, validate_schema};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("malformed schema JSON: {0}")]
    MalformedJson(String),
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("unresolvable reference `{0}`")]
    UnresolvableRef(String),
    #[error("ill-formed recursion: {}", .0.join(" -> "))]
    IllFormedRecursion(Vec<String>),
    #[error("compiled schema exceeds {0} nodes")]
    BlowupLimitExceeded(usize),
    #[error(transparent)]
    Regex(#[from] RegexError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schema {
    /// `{}`: accepts everything.
    Empty,
    String {
        pattern: Option<Pattern>,
    },
    Number {
        minimum: Option<u64>,
        maximum: Option<u64>,
        multiple_of: Option<u64>,
    },
    Object {
        min_properties: Option<usize>,
        max_properties: Option<usize>,
        required: Vec<String>,
        properties: Vec<(String, Schema)>,
        pattern_properties: Vec<(Pattern, Schema)>,
        additional_properties: Option<Box<Schema>>,
    },
    Array {
        items: Option<Vec<Schema>>,
        unique_items: bool,
        additional_items: Option<Box<Schema>>,
    },
    AllOf(Vec<Schema>),
    AnyOf(Vec<Schema>),
    Not(Box<Schema>),
    Enum(Vec<JsonTree>),
    /// Name of a definition.
    Ref(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaDocument {
    pub definitions: BTreeMap<String, Schema>,
    pub root: Schema,
}

const REF_PREFIX: &str = "#/definitions/";

const STRING_KEYS: &[&str] = &["pattern"];
const NUMBER_KEYS: &[&str] = &["minimum", "maximum", "multipleOf"];
const OBJECT_KEYS: &[&str] =
    &["minProperties", "maxProperties", "required", "properties", "patternProperties", "additionalProperties"];
const ARRAY_KEYS: &[&str] = &["items", "uniqueItems", "additionalItems"];
const BOOLEAN_KEYS: &[&str] = &["allOf", "anyOf", "not", "enum"];

pub fn parse_schema(text: &str) -> Result<SchemaDocument, SchemaError> {
    let value: Value = serde_json::from_str(text).map_err(|e| SchemaError::MalformedJson(e.to_string()))?;
    schema_document_from_value(&value)
}

pub fn schema_document_from_value(value: &Value) -> Result<SchemaDocument, SchemaError> {
    let mut definitions = BTreeMap::new();
    let root = match value {
        Value::Object(map) => {
            let mut rest = map.clone();
            if let Some(defs) = rest.remove("definitions") {
                let Value::Object(defs) = defs else {
                    return Err(mismatch("`definitions` must be an object"));
                };
                for (name, body) in &defs {
                    definitions.insert(name.clone(), parse_node(body)?);
                }
            }
            parse_object(&rest)?
        }
        other => parse_node(other)?,
    };
    let doc = SchemaDocument { definitions, root };
    doc.check_refs()?;
    Ok(doc)
}

fn mismatch(msg: impl Into<String>) -> SchemaError {
    SchemaError::TypeMismatch(msg.into())
}

fn parse_node(v: &Value) -> Result<Schema, SchemaError> {
    match v {
        Value::Object(map) => parse_object(map),
        Value::Bool(true) => Ok(Schema::Empty),
        Value::Bool(false) => Ok(Schema::Not(Box::new(Schema::Empty))),
        other => Err(mismatch(format!("expected a schema, found {other}"))),
    }
}

fn nat(map: &Map<String, Value>, key: &str) -> Result<Option<u64>, SchemaError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| mismatch(format!("`{key}` must be a natural number"))),
    }
}

fn schema_list(v: &Value, key: &str) -> Result<Vec<Schema>, SchemaError> {
    match v {
        Value::Array(items) => items.iter().map(parse_node).collect(),
        _ => Err(mismatch(format!("`{key}` must be a list of schemas"))),
    }
}

fn pattern(text: &str) -> Result<Pattern, SchemaError> {
    Ok(Pattern::new(parse_regex(text)?))
}

fn document(v: &Value) -> Result<JsonTree, SchemaError> {
    parse_document(&v.to_string()).map_err(|e| mismatch(format!("enum value {v}: {e}")))
}

fn parse_object(map: &Map<String, Value>) -> Result<Schema, SchemaError> {
    for key in map.keys() {
        let known = key == "type"
            || key == "$ref"
            || [STRING_KEYS, NUMBER_KEYS, OBJECT_KEYS, ARRAY_KEYS, BOOLEAN_KEYS].iter().any(|g| g.contains(&key.as_str()));
        if key == "definitions" {
            return Err(mismatch("`definitions` is only allowed at the document root"));
        }
        if !known {
            return Err(SchemaError::UnknownKeyword(key.clone()));
        }
    }
    if let Some(r) = map.get("$ref") {
        if map.len() > 1 {
            return Err(mismatch("`$ref` cannot be combined with other keywords"));
        }
        let Some(path) = r.as_str() else {
            return Err(mismatch("`$ref` must be a string"));
        };
        return match path.strip_prefix(REF_PREFIX) {
            Some(name) if !name.is_empty() && !name.contains('/') => Ok(Schema::Ref(name.to_string())),
            _ => Err(SchemaError::UnresolvableRef(path.to_string())),
        };
    }

    let ty = match map.get("type") {
        None => None,
        Some(Value::String(s)) if ["string", "number", "object", "array"].contains(&s.as_str()) => Some(s.as_str()),
        Some(other) => return Err(mismatch(format!("unsupported type {other}"))),
    };
    for (group, name) in [(STRING_KEYS, "string"), (NUMBER_KEYS, "number"), (OBJECT_KEYS, "object"), (ARRAY_KEYS, "array")] {
        if let Some(k) = group.iter().find(|k| map.contains_key(**k)) {
            if ty != Some(name) {
                return Err(mismatch(format!("`{k}` requires \"type\": \"{name}\"")));
            }
        }
    }

    let mut parts = Vec::new();
    match ty {
        Some("string") => {
            let pattern = match map.get("pattern") {
                None => None,
                Some(Value::String(s)) => Some(pattern(s)?),
                Some(_) => return Err(mismatch("`pattern` must be a string")),
            };
            parts.push(Schema::String { pattern });
        }
        Some("number") => parts.push(Schema::Number {
            minimum: nat(map, "minimum")?,
            maximum: nat(map, "maximum")?,
            multiple_of: nat(map, "multipleOf")?,
        }),
        Some("object") => {
            let required = match map.get("required") {
                None => Vec::new(),
                Some(Value::Array(ks)) => ks
                    .iter()
                    .map(|k| k.as_str().map(str::to_string).ok_or_else(|| mismatch("`required` must list strings")))
                    .collect::<Result<_, _>>()?,
                Some(_) => return Err(mismatch("`required` must be a list")),
            };
            let members = |key: &str| -> Result<Vec<(String, Schema)>, SchemaError> {
                match map.get(key) {
                    None => Ok(Vec::new()),
                    Some(Value::Object(m)) => m.iter().map(|(k, v)| Ok((k.clone(), parse_node(v)?))).collect(),
                    Some(_) => Err(mismatch(format!("`{key}` must be an object"))),
                }
            };
            let properties = members("properties")?;
            let pattern_properties = members("patternProperties")?
                .into_iter()
                .map(|(k, s)| Ok((pattern(&k)?, s)))
                .collect::<Result<_, SchemaError>>()?;
            parts.push(Schema::Object {
                min_properties: nat(map, "minProperties")?.map(|i| i as usize),
                max_properties: nat(map, "maxProperties")?.map(|i| i as usize),
                required,
                properties,
                pattern_properties,
                additional_properties: map.get("additionalProperties").map(parse_node).transpose()?.map(Box::new),
            });
        }
        Some("array") => {
            let unique_items = match map.get("uniqueItems") {
                None => false,
                Some(Value::Bool(b)) => *b,
                Some(_) => return Err(mismatch("`uniqueItems` must be a boolean")),
            };
            parts.push(Schema::Array {
                items: map.get("items").map(|v| schema_list(v, "items")).transpose()?,
                unique_items,
                additional_items: map.get("additionalItems").map(parse_node).transpose()?.map(Box::new),
            });
        }
        _ => {}
    }
    if let Some(v) = map.get("allOf") {
        parts.push(Schema::AllOf(schema_list(v, "allOf")?));
    }
    if let Some(v) = map.get("anyOf") {
        parts.push(Schema::AnyOf(schema_list(v, "anyOf")?));
    }
    if let Some(v) = map.get("not") {
        parts.push(Schema::Not(Box::new(parse_node(v)?)));
    }
    if let Some(v) = map.get("enum") {
        let Value::Array(vals) = v else {
            return Err(mismatch("`enum` must be a list"));
        };
        parts.push(Schema::Enum(vals.iter().map(document).collect::<Result<_, _>>()?));
    }
    Ok(match parts.len() {
        0 => Schema::Empty,
        1 => parts.pop().unwrap(),
        _ => Schema::AllOf(parts),
    })
}

impl Schema {
    /// Number of schema nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Schema::Object { properties, pattern_properties, additional_properties, .. } => {
                properties.iter().map(|(_, s)| s.size()).sum::<usize>()
                    + pattern_properties.iter().map(|(_, s)| s.size()).sum::<usize>()
                    + additional_properties.as_ref().map_or(0, |s| s.size())
            }
            Schema::Array { items, additional_items, .. } => {
                items.iter().flatten().map(Schema::size).sum::<usize>() + additional_items.as_ref().map_or(0, |s| s.size())
            }
            Schema::AllOf(ss) | Schema::AnyOf(ss) => ss.iter().map(Schema::size).sum(),
            Schema::Not(s) => s.size(),
            _ => 0,
        }
    }

    pub fn uses_refs(&self) -> bool {
        let mut found = false;
        self.visit_refs(false, &mut |_, _| found = true);
        found
    }

    /// Calls `f(name, guarded)` for every reference; `guarded` is true when
    /// the reference sits below a keyword that moves to a child node.
    pub fn visit_refs(&self, guarded: bool, f: &mut dyn FnMut(&str, bool)) {
        match self {
            Schema::Ref(name) => f(name, guarded),
            Schema::Object { properties, pattern_properties, additional_properties, .. } => {
                for (_, s) in properties {
                    s.visit_refs(true, f);
                }
                for (_, s) in pattern_properties {
                    s.visit_refs(true, f);
                }
                if let Some(s) = additional_properties {
                    s.visit_refs(true, f);
                }
            }
            Schema::Array { items, additional_items, .. } => {
                for s in items.iter().flatten() {
                    s.visit_refs(true, f);
                }
                if let Some(s) = additional_items {
                    s.visit_refs(true, f);
                }
            }
            Schema::AllOf(ss) | Schema::AnyOf(ss) => ss.iter().for_each(|s| s.visit_refs(guarded, f)),
            Schema::Not(s) => s.visit_refs(guarded, f),
            _ => {}
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Schema::Empty => json!({}),
            Schema::String { pattern } => {
                let mut m = Map::new();
                m.insert("type".into(), json!("string"));
                if let Some(p) = pattern {
                    m.insert("pattern".into(), json!(p.to_string()));
                }
                Value::Object(m)
            }
            Schema::Number { minimum, maximum, multiple_of } => {
                let mut m = Map::new();
                m.insert("type".into(), json!("number"));
                for (k, v) in [("minimum", minimum), ("maximum", maximum), ("multipleOf", multiple_of)] {
                    if let Some(v) = v {
                        m.insert(k.into(), json!(v));
                    }
                }
                Value::Object(m)
            }
            Schema::Object {
                min_properties,
                max_properties,
                required,
                properties,
                pattern_properties,
                additional_properties,
            } => {
                let mut m = Map::new();
                m.insert("type".into(), json!("object"));
                if let Some(i) = min_properties {
                    m.insert("minProperties".into(), json!(i));
                }
                if let Some(i) = max_properties {
                    m.insert("maxProperties".into(), json!(i));
                }
                if !required.is_empty() {
                    m.insert("required".into(), json!(required));
                }
                if !properties.is_empty() {
                    let ps: Map<_, _> = properties.iter().map(|(k, s)| (k.clone(), s.to_value())).collect();
                    m.insert("properties".into(), Value::Object(ps));
                }
                if !pattern_properties.is_empty() {
                    let ps: Map<_, _> = pattern_properties.iter().map(|(e, s)| (e.to_string(), s.to_value())).collect();
                    m.insert("patternProperties".into(), Value::Object(ps));
                }
                if let Some(s) = additional_properties {
                    m.insert("additionalProperties".into(), s.to_value());
                }
                Value::Object(m)
            }
            Schema::Array { items, unique_items, additional_items } => {
                let mut m = Map::new();
                m.insert("type".into(), json!("array"));
                if let Some(items) = items {
                    m.insert("items".into(), Value::Array(items.iter().map(Schema::to_value).collect()));
                }
                if *unique_items {
                    m.insert("uniqueItems".into(), json!(true));
                }
                if let Some(s) = additional_items {
                    m.insert("additionalItems".into(), s.to_value());
                }
                Value::Object(m)
            }
            Schema::AllOf(ss) => json!({ "allOf": ss.iter().map(Schema::to_value).collect::<Vec<_>>() }),
            Schema::AnyOf(ss) => json!({ "anyOf": ss.iter().map(Schema::to_value).collect::<Vec<_>>() }),
            Schema::Not(s) => json!({ "not": s.to_value() }),
            Schema::Enum(docs) => {
                let vals: Vec<Value> = docs
                    .iter()
                    .map(|d| serde_json::from_str(d.canonical()).expect("canonical text is JSON"))
                    .collect();
                json!({ "enum": vals })
            }
            Schema::Ref(name) => json!({ "$ref": format!("{REF_PREFIX}{name}") }),
        }
    }
}

impl SchemaDocument {
    pub fn plain(root: Schema) -> Self {
        SchemaDocument { definitions: BTreeMap::new(), root }
    }

    pub fn size(&self) -> usize {
        self.root.size() + self.definitions.values().map(Schema::size).sum::<usize>()
    }

    pub fn uses_refs(&self) -> bool {
        self.root.uses_refs() || self.definitions.values().any(Schema::uses_refs)
    }

    fn check_refs(&self) -> Result<(), SchemaError> {
        let mut missing = None;
        let mut check = |name: &str, _| {
            if missing.is_none() && !self.definitions.contains_key(name) {
                missing = Some(format!("{REF_PREFIX}{name}"));
            }
        };
        self.root.visit_refs(false, &mut check);
        for s in self.definitions.values() {
            s.visit_refs(false, &mut check);
        }
        missing.map_or(Ok(()), |m| Err(SchemaError::UnresolvableRef(m)))
    }

    pub fn to_value(&self) -> Value {
        let mut v = self.root.to_value();
        if !self.definitions.is_empty() {
            let defs: Map<_, _> = self.definitions.iter().map(|(k, s)| (k.clone(), s.to_value())).collect();
            if let Value::Object(m) = &mut v {
                m.insert("definitions".into(), Value::Object(defs));
            }
        }
        v
    }
}

impl fmt::Display for SchemaDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(&self.to_value()).expect("values serialize"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_object_schema() {
        let doc = parse_schema(
            r##"{"type":"object","properties":{"name":{"type":"string"}},
                "patternProperties":{"a(b|c)a":{"type":"number","multipleOf":2}},
                "additionalProperties":{"type":"number","minimum":1,"maximum":1}}"##,
        )
        .unwrap();
        let Schema::Object { properties, pattern_properties, additional_properties, .. } = &doc.root else {
            panic!("{:?}", doc.root)
        };
        assert_eq!(properties.len(), 1);
        assert_eq!(pattern_properties[0].0.to_string(), "a(b|c)a");
        assert!(additional_properties.is_some());
    }

    #[test]
    fn parses_definitions() {
        let doc = parse_schema(
            r##"{"definitions":{"email":{"type":"string","pattern":"[A-z]*@ciws\\.cl"}},
                "not":{"$ref":"#/definitions/email"}}"##,
        )
        .unwrap();
        assert_eq!(doc.root, Schema::Not(Box::new(Schema::Ref("email".into()))));
        assert_eq!(doc.definitions.len(), 1);
    }

    #[test]
    fn errors() {
        assert_eq!(parse_schema("{}").unwrap().root, Schema::Empty);
        assert!(matches!(parse_schema(r##"{"foo":1}"##), Err(SchemaError::UnknownKeyword(_))));
        assert!(matches!(parse_schema(r##"{"pattern":"a"}"##), Err(SchemaError::TypeMismatch(_))));
        assert!(matches!(parse_schema(r##"{"type":"number","pattern":"a"}"##), Err(SchemaError::TypeMismatch(_))));
        assert!(matches!(parse_schema(r##"{"$ref":"#/definitions/x"}"##), Err(SchemaError::UnresolvableRef(_))));
        assert!(matches!(parse_schema(r##"{"$ref":"other.json#/x"}"##), Err(SchemaError::UnresolvableRef(_))));
        assert!(matches!(parse_schema(r##"{"enum":[true]}"##), Err(SchemaError::TypeMismatch(_))));
        assert!(matches!(parse_schema(r##"{"type":"number","minimum":-1}"##), Err(SchemaError::TypeMismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        for s in [
            r##"{"type":"array","items":[{"type":"string"},{"type":"string"}],"additionalItems":{"type":"number"},"uniqueItems":true}"##,
            r##"{"anyOf":[{"type":"number","maximum":3},{"enum":[{"a":[1]},"x"]}],"not":{"type":"string","pattern":"a+"}}"##,
            r##"{"definitions":{"t":{"type":"array","items":[{"$ref":"#/definitions/t"}]}},"$ref":"#/definitions/t"}"##,
        ] {
            let doc = parse_schema(s).unwrap();
            let again = parse_schema(&doc.to_string()).unwrap();
            assert_eq!(doc, again, "{s}");
        }
    }
}
