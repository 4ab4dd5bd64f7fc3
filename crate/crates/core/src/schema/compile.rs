use std::collections::{BTreeMap, HashMap};

use super::{Schema, SchemaDocument, SchemaError};
use crate::jsl::{JslFormula, NodeTest};
use crate::recursive::{is_reserved, RecursiveJsl};
use crate::regex::{complement_intersection, Pattern, Regex};

/// Default limit on the number of schema nodes `jsl_to_schema` may emit.
pub const DEFAULT_SCHEMA_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compiled {
    Plain(JslFormula),
    Recursive(RecursiveJsl),
}

impl Compiled {
    pub fn into_recursive(self) -> RecursiveJsl {
        match self {
            Compiled::Plain(phi) => RecursiveJsl::plain(phi),
            Compiled::Recursive(r) => r,
        }
    }
}

impl std::fmt::Display for Compiled {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Compiled::Plain(phi) => write!(f, "{phi}"),
            Compiled::Recursive(r) => write!(f, "{r}"),
        }
    }
}

/// Compiles a schema to an equivalent JSL formula, or to a recursive
/// expression when the schema uses references.
pub fn schema_to_jsl(doc: &SchemaDocument) -> Result<Compiled, SchemaError> {
    if !doc.uses_refs() {
        return Ok(Compiled::Plain(to_jsl(&doc.root, &HashMap::new())?));
    }
    let mut names: HashMap<&str, String> = HashMap::new();
    let mut taken: Vec<String> = Vec::new();
    for (i, name) in doc.definitions.keys().enumerate() {
        let plain = name.starts_with(|c: char| c.is_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_alphanumeric() || c == '_')
            && !is_reserved(name);
        let mut sym = if plain { name.clone() } else { format!("def{i}") };
        while taken.contains(&sym) || (sym != *name && doc.definitions.contains_key(&sym)) {
            sym.push('_');
        }
        taken.push(sym.clone());
        names.insert(name, sym);
    }
    let definitions = doc
        .definitions
        .iter()
        .map(|(name, s)| Ok((names[name.as_str()].clone(), to_jsl(s, &names)?)))
        .collect::<Result<_, SchemaError>>()?;
    Ok(Compiled::Recursive(RecursiveJsl { definitions, base: to_jsl(&doc.root, &names)? }))
}

fn to_jsl(s: &Schema, names: &HashMap<&str, String>) -> Result<JslFormula, SchemaError> {
    let test = JslFormula::Test;
    Ok(match s {
        Schema::Empty => JslFormula::True,
        Schema::String { pattern } => {
            JslFormula::all([test(NodeTest::Str)].into_iter().chain(pattern.clone().map(|p| test(NodeTest::Pattern(p)))))
        }
        Schema::Number { minimum, maximum, multiple_of } => JslFormula::all(
            [Some(test(NodeTest::Int)), minimum.map(|i| test(NodeTest::Min(i))), maximum.map(|i| test(NodeTest::Max(i))), multiple_of.map(|i| test(NodeTest::MultOf(i)))]
                .into_iter()
                .flatten(),
        ),
        Schema::Object {
            min_properties,
            max_properties,
            required,
            properties,
            pattern_properties,
            additional_properties,
        } => {
            let mut parts = vec![test(NodeTest::Obj)];
            parts.extend(min_properties.map(|i| test(NodeTest::MinCh(i))));
            parts.extend(max_properties.map(|i| test(NodeTest::MaxCh(i))));
            for k in required {
                parts.push(JslFormula::dia_key(Pattern::word(k), JslFormula::True));
            }
            for (k, sub) in properties {
                parts.push(JslFormula::box_key(Pattern::word(k), to_jsl(sub, names)?));
            }
            for (e, sub) in pattern_properties {
                parts.push(JslFormula::box_key(e.clone(), to_jsl(sub, names)?));
            }
            if let Some(sub) = additional_properties {
                let listed: Vec<Regex> = properties
                    .iter()
                    .map(|(k, _)| Regex::word(k))
                    .chain(pattern_properties.iter().map(|(e, _)| e.regex().clone()))
                    .collect();
                let rest = if listed.is_empty() {
                    Some(Pattern::sigma_star())
                } else {
                    let dfa = complement_intersection(&listed)?;
                    (!dfa.is_empty()).then(|| Pattern::new(dfa.to_regex()))
                };
                if let Some(c) = rest {
                    parts.push(JslFormula::box_key(c, to_jsl(sub, names)?));
                }
            }
            JslFormula::all(parts)
        }
        Schema::Array { items, unique_items, additional_items } => {
            let mut parts = vec![test(NodeTest::Arr)];
            if *unique_items {
                parts.push(test(NodeTest::Unique));
            }
            let listed = items.as_ref().map_or(0, Vec::len);
            for (k, sub) in items.iter().flatten().enumerate() {
                parts.push(JslFormula::dia_idx(k + 1, Some(k + 1), to_jsl(sub, names)?));
            }
            match additional_items {
                Some(sub) => parts.push(JslFormula::box_idx(listed + 1, None, to_jsl(sub, names)?)),
                None if items.is_some() => parts.push(JslFormula::box_idx(listed + 1, None, JslFormula::falsum())),
                None => {}
            }
            JslFormula::all(parts)
        }
        Schema::AllOf(ss) => JslFormula::all(ss.iter().map(|s| to_jsl(s, names)).collect::<Result<Vec<_>, _>>()?),
        Schema::AnyOf(ss) => JslFormula::any(ss.iter().map(|s| to_jsl(s, names)).collect::<Result<Vec<_>, _>>()?),
        Schema::Not(s) => JslFormula::not(to_jsl(s, names)?),
        Schema::Enum(docs) => JslFormula::any(docs.iter().map(|d| test(NodeTest::SameAs(d.clone())))),
        Schema::Ref(name) => JslFormula::Var(names[name.as_str()].clone()),
    })
}

pub fn jsl_to_schema(phi: &JslFormula) -> Result<SchemaDocument, SchemaError> {
    jsl_to_schema_with_cap(phi, DEFAULT_SCHEMA_CAP)
}

/// Compiles a JSL formula to an equivalent schema. Symbols become
/// references into `definitions`.
pub fn jsl_to_schema_with_cap(phi: &JslFormula, cap: usize) -> Result<SchemaDocument, SchemaError> {
    let mut b = Builder { cap, used: 0 };
    Ok(SchemaDocument::plain(b.build(phi)?))
}

pub fn rjsl_to_schema(expr: &RecursiveJsl) -> Result<SchemaDocument, SchemaError> {
    let mut b = Builder { cap: DEFAULT_SCHEMA_CAP, used: 0 };
    let mut definitions = BTreeMap::new();
    for (name, body) in &expr.definitions {
        definitions.insert(name.clone(), b.build(body)?);
    }
    Ok(SchemaDocument { definitions, root: b.build(&expr.base)? })
}

struct Builder {
    cap: usize,
    used: usize,
}

fn object() -> Schema {
    object_with(|_, _, _, _, _| {})
}

type Members<T> = Vec<(T, Schema)>;

fn object_with(
    f: impl FnOnce(&mut Option<usize>, &mut Option<usize>, &mut Vec<String>, &mut Members<String>, &mut Members<Pattern>),
) -> Schema {
    let (mut min, mut max, mut required, mut properties, mut pattern_properties) =
        (None, None, Vec::new(), Vec::new(), Vec::new());
    f(&mut min, &mut max, &mut required, &mut properties, &mut pattern_properties);
    Schema::Object {
        min_properties: min,
        max_properties: max,
        required,
        properties,
        pattern_properties,
        additional_properties: None,
    }
}

fn array(items: Option<Vec<Schema>>, additional_items: Option<Schema>) -> Schema {
    Schema::Array { items, unique_items: false, additional_items: additional_items.map(Box::new) }
}

fn not(s: Schema) -> Schema {
    Schema::Not(Box::new(s))
}

impl Builder {
    fn spend(&mut self, n: usize) -> Result<(), SchemaError> {
        self.used = self.used.saturating_add(n);
        if self.used > self.cap {
            return Err(SchemaError::BlowupLimitExceeded(self.cap));
        }
        Ok(())
    }

    /// An array of exactly `k` elements.
    fn exact_array(&mut self, k: usize) -> Result<Schema, SchemaError> {
        self.spend(k + 1)?;
        Ok(array(Some(vec![Schema::Empty; k]), None))
    }

    /// An array whose element at position `p` satisfies `s`.
    fn at_position(&mut self, p: usize, s: Schema) -> Result<Schema, SchemaError> {
        self.spend(p + 1)?;
        let mut items = vec![Schema::Empty; p - 1];
        items.push(s);
        Ok(array(Some(items), Some(Schema::Empty)))
    }

    /// Every array element from position `i` on satisfies `s`.
    fn box_from(&mut self, i: usize, s: Schema) -> Result<Schema, SchemaError> {
        let mut alts = vec![not(array(None, None))];
        for k in 0..i.saturating_sub(1) {
            alts.push(self.exact_array(k)?);
        }
        self.spend(i + 1)?;
        alts.push(array(Some(vec![Schema::Empty; i - 1]), Some(s)));
        Ok(Schema::AnyOf(alts))
    }

    fn dia_range(&mut self, i: usize, j: usize, s: Schema) -> Result<Schema, SchemaError> {
        let mut alts = Vec::new();
        for p in i..=j {
            alts.push(self.at_position(p, s.clone())?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Schema::AnyOf(alts) })
    }

    fn build(&mut self, phi: &JslFormula) -> Result<Schema, SchemaError> {
        self.spend(1)?;
        Ok(match phi {
            JslFormula::True => Schema::Empty,
            JslFormula::Not(a) => not(self.build(a)?),
            JslFormula::And(..) => {
                let mut parts = Vec::new();
                self.flatten(phi, true, &mut parts)?;
                Schema::AllOf(parts)
            }
            JslFormula::Or(..) => {
                let mut parts = Vec::new();
                self.flatten(phi, false, &mut parts)?;
                Schema::AnyOf(parts)
            }
            JslFormula::Test(t) => self.test(t)?,
            JslFormula::BoxKey(e, a) => {
                let s = self.build(a)?;
                let guarded = match e.as_word() {
                    Some(w) => object_with(|_, _, _, p, _| p.push((w.to_string(), s))),
                    None => object_with(|_, _, _, _, pp| pp.push((e.clone(), s))),
                };
                Schema::AnyOf(vec![not(object()), guarded])
            }
            JslFormula::DiaKey(e, a) => {
                let s = self.build(a)?;
                match e.as_word() {
                    Some(w) => object_with(|_, _, r, p, _| {
                        r.push(w.to_string());
                        p.push((w.to_string(), s));
                    }),
                    None => not(Schema::AnyOf(vec![
                        not(object()),
                        object_with(|_, _, _, _, pp| pp.push((e.clone(), not(s)))),
                    ])),
                }
            }
            JslFormula::DiaIdx(i, Some(j), a) => {
                let s = self.build(a)?;
                self.dia_range(*i, *j, s)?
            }
            JslFormula::DiaIdx(i, None, a) => {
                let s = self.build(a)?;
                not(self.box_from(*i, not(s))?)
            }
            JslFormula::BoxIdx(i, None, a) => {
                let s = self.build(a)?;
                self.box_from(*i, s)?
            }
            JslFormula::BoxIdx(i, Some(j), a) => {
                let s = self.build(a)?;
                not(self.dia_range(*i, *j, not(s))?)
            }
            JslFormula::Var(v) => Schema::Ref(v.clone()),
        })
    }

    fn flatten(&mut self, phi: &JslFormula, conj: bool, out: &mut Vec<Schema>) -> Result<(), SchemaError> {
        match (phi, conj) {
            (JslFormula::And(a, b), true) | (JslFormula::Or(a, b), false) => {
                self.flatten(a, conj, out)?;
                self.flatten(b, conj, out)
            }
            _ => {
                out.push(self.build(phi)?);
                Ok(())
            }
        }
    }

    fn test(&mut self, t: &NodeTest) -> Result<Schema, SchemaError> {
        let number = |minimum, maximum, multiple_of| Schema::Number { minimum, maximum, multiple_of };
        Ok(match t {
            NodeTest::Arr => array(None, None),
            NodeTest::Obj => object(),
            NodeTest::Str => Schema::String { pattern: None },
            NodeTest::Int => number(None, None, None),
            NodeTest::Unique => Schema::Array { items: None, unique_items: true, additional_items: None },
            NodeTest::Pattern(e) => Schema::String { pattern: Some(e.clone()) },
            NodeTest::Min(i) => number(Some(*i), None, None),
            NodeTest::Max(i) => number(None, Some(*i), None),
            NodeTest::MultOf(i) => number(None, None, Some(*i)),
            NodeTest::MinCh(0) => Schema::Empty,
            NodeTest::MinCh(i) => {
                self.spend(i + 2)?;
                Schema::AnyOf(vec![
                    object_with(|min, _, _, _, _| *min = Some(*i)),
                    array(Some(vec![Schema::Empty; *i]), Some(Schema::Empty)),
                ])
            }
            NodeTest::MaxCh(i) => {
                let mut alts = vec![
                    object_with(|_, max, _, _, _| *max = Some(*i)),
                    Schema::String { pattern: None },
                    number(None, None, None),
                ];
                for k in 0..=*i {
                    alts.push(self.exact_array(k)?);
                }
                Schema::AnyOf(alts)
            }
            NodeTest::SameAs(a) => Schema::Enum(vec![a.clone()]),
        })
    }
}
