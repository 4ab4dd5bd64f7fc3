#![allow(dead_code)]

use std::collections::BTreeMap;

use jsonlogic::jnl::{JnlBinary, JnlUnary};
use jsonlogic::jsl::{JslFormula, NodeTest};
use jsonlogic::recursive::RecursiveJsl;
use jsonlogic::regex::Pattern;
use jsonlogic::tree::{EdgeLabel, JsonValue};
use jsonlogic::{JsonTree, NodeIx};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub const KEYS: &[&str] = &["a", "b", "c"];
pub const STRINGS: &[&str] = &["x", "y", "ab"];
pub const INTS: &[u64] = &[0, 1, 2, 3, 4];

/// Random value with at most `budget` nodes and height at most `depth`.
pub fn random_value(rng: &mut StdRng, depth: usize, budget: &mut usize) -> JsonValue {
    *budget = budget.saturating_sub(1);
    let leaf = depth == 0 || *budget == 0;
    match rng.gen_range(0..if leaf { 4 } else { 7 }) {
        0 => JsonValue::Obj(BTreeMap::new()),
        1 => JsonValue::Arr(Vec::new()),
        2 => JsonValue::Str(STRINGS.choose(rng).unwrap().to_string()),
        3 => JsonValue::Int(*INTS.choose(rng).unwrap()),
        4 | 5 => {
            let mut m = BTreeMap::new();
            for k in KEYS {
                if *budget > 0 && rng.gen_bool(0.5) {
                    m.insert(k.to_string(), random_value(rng, depth - 1, budget));
                }
            }
            JsonValue::Obj(m)
        }
        _ => {
            let n = rng.gen_range(0..=3);
            let mut items = Vec::new();
            for _ in 0..n {
                if *budget == 0 {
                    break;
                }
                items.push(random_value(rng, depth - 1, budget));
            }
            JsonValue::Arr(items)
        }
    }
}

pub fn random_tree(rng: &mut StdRng, depth: usize, max_nodes: usize) -> JsonTree {
    let mut budget = max_nodes;
    random_value(rng, depth, &mut budget).to_tree()
}

/// JSON text written without the library, with shuffled keys, escapes and
/// irregular whitespace.
pub fn random_text(rng: &mut StdRng, depth: usize) -> String {
    const KEY_POOL: &[&str] = &["a", "b", "key", "é", "with space", "q\"uote", "", "1"];
    const STR_POOL: &[&str] = &["", "x", "line\nbreak", "tab\t", "ü", "\\", "emoji 🦀"];
    let ws = |rng: &mut StdRng| [" ", "", "\n  ", "\t"].choose(rng).unwrap().to_string();
    let quote = |s: &str| serde_json::to_string(s).unwrap();
    match rng.gen_range(0..if depth == 0 { 2 } else { 4 }) {
        0 => quote(STR_POOL.choose(rng).unwrap()),
        1 => rng.gen_range(0..100_000u64).to_string(),
        2 => {
            let count = rng.gen_range(0..4);
            let mut keys: Vec<&str> = KEY_POOL.choose_multiple(rng, count).copied().collect();
            keys.shuffle(rng);
            let parts: Vec<String> = keys
                .iter()
                .map(|k| format!("{}{}:{}{}", ws(rng), quote(k), ws(rng), random_text(rng, depth - 1)))
                .collect();
            format!("{{{}}}", parts.join(","))
        }
        _ => {
            let n = rng.gen_range(0..4);
            let parts: Vec<String> = (0..n).map(|_| format!("{}{}", ws(rng), random_text(rng, depth - 1))).collect();
            format!("[{}{}]", parts.join(","), ws(rng))
        }
    }
}

pub fn key_patterns() -> Vec<Pattern> {
    ["a", "b", "a|b", ".*", "c+", "a.*"].iter().map(|p| Pattern::parse(p).unwrap()).collect()
}

pub fn string_patterns() -> Vec<Pattern> {
    ["x", "a.*", "x|y", ".*b"].iter().map(|p| Pattern::parse(p).unwrap()).collect()
}

pub const RANGES: &[(usize, Option<usize>)] = &[(1, Some(1)), (2, Some(2)), (1, Some(2)), (2, None), (1, None), (3, Some(3))];

fn small_constant(rng: &mut StdRng) -> JsonTree {
    let mut budget = 3;
    random_value(rng, 1, &mut budget).to_tree()
}

pub fn random_node_test(rng: &mut StdRng) -> NodeTest {
    match rng.gen_range(0..12) {
        0 => NodeTest::Arr,
        1 => NodeTest::Obj,
        2 => NodeTest::Str,
        3 => NodeTest::Int,
        4 => NodeTest::Unique,
        5 => NodeTest::Pattern(string_patterns().choose(rng).unwrap().clone()),
        6 => NodeTest::Min(rng.gen_range(0..5)),
        7 => NodeTest::Max(rng.gen_range(0..5)),
        8 => NodeTest::MultOf(rng.gen_range(0..4)),
        9 => NodeTest::MinCh(rng.gen_range(0..3)),
        10 => NodeTest::MaxCh(rng.gen_range(0..3)),
        _ => NodeTest::SameAs(small_constant(rng)),
    }
}

/// Random JSL formula. With `same_only` the only node test is `same(A)`.
pub fn random_jsl(rng: &mut StdRng, depth: usize, same_only: bool) -> JslFormula {
    let atom = |rng: &mut StdRng| {
        if rng.gen_bool(0.15) {
            JslFormula::True
        } else if same_only {
            JslFormula::Test(NodeTest::SameAs(small_constant(rng)))
        } else {
            JslFormula::Test(random_node_test(rng))
        }
    };
    if depth == 0 {
        return atom(rng);
    }
    let sub = |rng: &mut StdRng| random_jsl(rng, depth - 1, same_only);
    match rng.gen_range(0..9) {
        0 => atom(rng),
        1 => JslFormula::not(sub(rng)),
        2 => JslFormula::and(sub(rng), sub(rng)),
        3 => JslFormula::or(sub(rng), sub(rng)),
        4 => JslFormula::box_key(key_patterns().choose(rng).unwrap().clone(), sub(rng)),
        5 => JslFormula::dia_key(key_patterns().choose(rng).unwrap().clone(), sub(rng)),
        6 => {
            let (i, j) = *RANGES.choose(rng).unwrap();
            JslFormula::box_idx(i, j, sub(rng))
        }
        _ => {
            let (i, j) = *RANGES.choose(rng).unwrap();
            JslFormula::dia_idx(i, j, sub(rng))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct JnlShape {
    pub star: bool,
    pub eq_paths: bool,
}

pub fn random_jnl(rng: &mut StdRng, depth: usize, shape: JnlShape) -> JnlUnary {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => JnlUnary::Top,
            1 => JnlUnary::Exists(random_axis(rng)),
            _ => JnlUnary::EqConst(JnlBinary::Eps, small_constant(rng)),
        };
    }
    let sub = |rng: &mut StdRng| random_jnl(rng, depth - 1, shape);
    let path = |rng: &mut StdRng| random_path(rng, depth - 1, shape);
    match rng.gen_range(0..if shape.eq_paths { 8 } else { 7 }) {
        0 => JnlUnary::Top,
        1 => JnlUnary::not(sub(rng)),
        2 => JnlUnary::and(sub(rng), sub(rng)),
        3 => JnlUnary::or(sub(rng), sub(rng)),
        4 | 5 => JnlUnary::Exists(path(rng)),
        6 => JnlUnary::EqConst(path(rng), small_constant(rng)),
        _ => JnlUnary::EqPaths(path(rng), path(rng)),
    }
}

fn random_axis(rng: &mut StdRng) -> JnlBinary {
    match rng.gen_range(0..5) {
        0 => JnlBinary::Key(KEYS.choose(rng).unwrap().to_string()),
        1 => JnlBinary::KeyRegex(key_patterns().choose(rng).unwrap().clone()),
        2 => JnlBinary::Idx(rng.gen_range(1..=3)),
        3 => {
            let (i, j) = *RANGES.choose(rng).unwrap();
            JnlBinary::IdxRange(i, j)
        }
        _ => JnlBinary::Eps,
    }
}

pub fn random_path(rng: &mut StdRng, depth: usize, shape: JnlShape) -> JnlBinary {
    if depth == 0 {
        return random_axis(rng);
    }
    let sub = |rng: &mut StdRng| random_path(rng, depth - 1, shape);
    match rng.gen_range(0..if shape.star { 6 } else { 5 }) {
        0 | 1 => random_axis(rng),
        2 | 3 => JnlBinary::compose(sub(rng), sub(rng)),
        4 => JnlBinary::test(random_jnl(rng, depth - 1, shape)),
        _ => JnlBinary::star(sub(rng)),
    }
}

/// Well-formed by construction: a definition may mention earlier symbols
/// anywhere and any symbol under a modality.
pub fn random_rjsl(rng: &mut StdRng) -> RecursiveJsl {
    let n = rng.gen_range(1..=3);
    let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let mut definitions = Vec::new();
    for i in 0..n {
        let body = random_rjsl_body(rng, 3, &names, i, false);
        definitions.push((names[i].clone(), body));
    }
    let base = random_rjsl_body(rng, 2, &names, n, false);
    RecursiveJsl { definitions, base }
}

fn random_rjsl_body(rng: &mut StdRng, depth: usize, names: &[String], below: usize, guarded: bool) -> JslFormula {
    let var = |rng: &mut StdRng| -> Option<JslFormula> {
        let pool = if guarded { names.len() } else { below };
        (pool > 0).then(|| JslFormula::Var(names[rng.gen_range(0..pool)].clone()))
    };
    if depth == 0 {
        if rng.gen_bool(0.5) {
            if let Some(v) = var(rng) {
                return v;
            }
        }
        return JslFormula::Test(random_node_test(rng));
    }
    let sub = |rng: &mut StdRng, guarded| random_rjsl_body(rng, depth - 1, names, below, guarded);
    match rng.gen_range(0..8) {
        0 => var(rng).unwrap_or(JslFormula::True),
        1 => JslFormula::not(sub(rng, guarded)),
        2 => JslFormula::and(sub(rng, guarded), sub(rng, guarded)),
        3 => JslFormula::or(sub(rng, guarded), sub(rng, guarded)),
        4 => JslFormula::box_key(key_patterns().choose(rng).unwrap().clone(), sub(rng, true)),
        5 => JslFormula::dia_key(key_patterns().choose(rng).unwrap().clone(), sub(rng, true)),
        6 => {
            let (i, j) = *RANGES.choose(rng).unwrap();
            JslFormula::box_idx(i, j, sub(rng, true))
        }
        _ => {
            let (i, j) = *RANGES.choose(rng).unwrap();
            JslFormula::dia_idx(i, j, sub(rng, true))
        }
    }
}

fn children(v: &JsonValue) -> Vec<(EdgeLabel, &JsonValue)> {
    match v {
        JsonValue::Obj(m) => m.iter().map(|(k, c)| (EdgeLabel::Key(k.clone()), c)).collect(),
        JsonValue::Arr(items) => items.iter().enumerate().map(|(i, c)| (EdgeLabel::Index(i + 1), c)).collect(),
        _ => Vec::new(),
    }
}

fn in_range(p: usize, i: usize, j: Option<usize>) -> bool {
    p >= i && j.is_none_or(|j| p <= j)
}

/// JSL truth read directly off the value, one clause per constructor.
pub fn jsl_oracle(v: &JsonValue, phi: &JslFormula) -> bool {
    let kids = children(v);
    let keyed = |e: &Pattern| {
        kids.iter().filter(move |(l, _)| matches!(l, EdgeLabel::Key(k) if e.matches(k))).map(|(_, c)| *c).collect::<Vec<_>>()
    };
    let indexed = |i: usize, j: Option<usize>| {
        kids.iter().filter(move |(l, _)| matches!(l, EdgeLabel::Index(p) if in_range(*p, i, j))).map(|(_, c)| *c).collect::<Vec<_>>()
    };
    match phi {
        JslFormula::True => true,
        JslFormula::Not(a) => !jsl_oracle(v, a),
        JslFormula::And(a, b) => jsl_oracle(v, a) && jsl_oracle(v, b),
        JslFormula::Or(a, b) => jsl_oracle(v, a) || jsl_oracle(v, b),
        JslFormula::Test(t) => test_oracle(v, t),
        JslFormula::BoxKey(e, a) => keyed(e).iter().all(|c| jsl_oracle(c, a)),
        JslFormula::DiaKey(e, a) => keyed(e).iter().any(|c| jsl_oracle(c, a)),
        JslFormula::BoxIdx(i, j, a) => indexed(*i, *j).iter().all(|c| jsl_oracle(c, a)),
        JslFormula::DiaIdx(i, j, a) => indexed(*i, *j).iter().any(|c| jsl_oracle(c, a)),
        JslFormula::Var(x) => panic!("free symbol {x}"),
    }
}

fn test_oracle(v: &JsonValue, t: &NodeTest) -> bool {
    let count = children(v).len();
    match (t, v) {
        (NodeTest::Arr, JsonValue::Arr(_)) | (NodeTest::Obj, JsonValue::Obj(_)) => true,
        (NodeTest::Str, JsonValue::Str(_)) | (NodeTest::Int, JsonValue::Int(_)) => true,
        (NodeTest::Unique, JsonValue::Arr(items)) => {
            (0..items.len()).all(|i| (i + 1..items.len()).all(|j| items[i] != items[j]))
        }
        (NodeTest::Pattern(e), JsonValue::Str(s)) => e.matches(s),
        (NodeTest::Min(c), JsonValue::Int(i)) => i >= c,
        (NodeTest::Max(c), JsonValue::Int(i)) => i <= c,
        (NodeTest::MultOf(0), JsonValue::Int(i)) => *i == 0,
        (NodeTest::MultOf(c), JsonValue::Int(i)) => i % c == 0,
        (NodeTest::MinCh(k), _) => count >= *k,
        (NodeTest::MaxCh(k), _) => count <= *k,
        (NodeTest::SameAs(a), _) => a.to_value(a.root()) == *v,
        _ => false,
    }
}

/// Every node's value, indexed like the tree.
pub fn values(t: &JsonTree) -> Vec<JsonValue> {
    t.nodes().map(|n| t.to_value(n)).collect()
}

type Relation = Vec<Vec<bool>>;

/// Binary relations as boolean matrices, composed and closed by brute
/// force.
pub struct JnlOracle<'t> {
    t: &'t JsonTree,
    values: Vec<JsonValue>,
}

impl<'t> JnlOracle<'t> {
    pub fn new(t: &'t JsonTree) -> Self {
        JnlOracle { t, values: values(t) }
    }

    fn n(&self) -> usize {
        self.t.len()
    }

    fn edges(&self, keep: impl Fn(&EdgeLabel) -> bool) -> Relation {
        let mut r = vec![vec![false; self.n()]; self.n()];
        for c in self.t.nodes() {
            if let (Some(p), Some(l)) = (self.t.parent(c), self.t.label(c)) {
                if keep(l) {
                    r[p.index()][c.index()] = true;
                }
            }
        }
        r
    }

    fn identity(&self, keep: impl Fn(usize) -> bool) -> Relation {
        let mut r = vec![vec![false; self.n()]; self.n()];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = keep(i);
        }
        r
    }

    fn compose(&self, a: &Relation, b: &Relation) -> Relation {
        let n = self.n();
        let mut r = vec![vec![false; n]; n];
        for x in 0..n {
            for y in 0..n {
                if a[x][y] {
                    for z in 0..n {
                        r[x][z] |= b[y][z];
                    }
                }
            }
        }
        r
    }

    pub fn binary(&self, alpha: &JnlBinary) -> Relation {
        match alpha {
            JnlBinary::Key(w) => self.edges(|l| matches!(l, EdgeLabel::Key(k) if k == w)),
            JnlBinary::KeyRegex(e) => self.edges(|l| matches!(l, EdgeLabel::Key(k) if e.matches(k))),
            JnlBinary::Idx(i) => self.edges(|l| matches!(l, EdgeLabel::Index(p) if p == i)),
            JnlBinary::IdxRange(i, j) => self.edges(|l| matches!(l, EdgeLabel::Index(p) if in_range(*p, *i, *j))),
            JnlBinary::Eps => self.identity(|_| true),
            JnlBinary::Test(phi) => {
                let s = self.unary(phi);
                self.identity(|i| s[i])
            }
            JnlBinary::Compose(a, b) => self.compose(&self.binary(a), &self.binary(b)),
            JnlBinary::Star(a) => {
                let step = self.binary(a);
                let mut r = self.identity(|_| true);
                loop {
                    let next = self.compose(&r, &step);
                    let mut grew = false;
                    for x in 0..self.n() {
                        for y in 0..self.n() {
                            if next[x][y] && !r[x][y] {
                                r[x][y] = true;
                                grew = true;
                            }
                        }
                    }
                    if !grew {
                        return r;
                    }
                }
            }
        }
    }

    pub fn unary(&self, phi: &JnlUnary) -> Vec<bool> {
        let n = self.n();
        match phi {
            JnlUnary::Top => vec![true; n],
            JnlUnary::Not(a) => self.unary(a).into_iter().map(|b| !b).collect(),
            JnlUnary::And(a, b) => self.unary(a).into_iter().zip(self.unary(b)).map(|(x, y)| x && y).collect(),
            JnlUnary::Or(a, b) => self.unary(a).into_iter().zip(self.unary(b)).map(|(x, y)| x || y).collect(),
            JnlUnary::Exists(a) => self.binary(a).into_iter().map(|row| row.contains(&true)).collect(),
            JnlUnary::EqConst(a, c) => {
                let target = c.to_value(c.root());
                self.binary(a).into_iter().map(|row| (0..n).any(|m| row[m] && self.values[m] == target)).collect()
            }
            JnlUnary::EqPaths(a, b) => {
                let (ra, rb) = (self.binary(a), self.binary(b));
                (0..n)
                    .map(|x| (0..n).any(|m1| ra[x][m1] && (0..n).any(|m2| rb[x][m2] && self.values[m1] == self.values[m2])))
                    .collect()
            }
        }
    }
}

pub fn members(t: &JsonTree, set: &jsonlogic::NodeSet) -> Vec<bool> {
    t.nodes().map(|n| set.contains(n)).collect()
}

pub fn node(i: usize) -> NodeIx {
    NodeIx::from_index(i)
}

/// Schemas exercising every keyword, as JSON text.
pub const SCHEMA_CORPUS: &[&str] = &[
    r#"{"type":"string"}"#,
    r#"{"type":"string","pattern":"a.*"}"#,
    r#"{"type":"number","minimum":2}"#,
    r#"{"type":"number","maximum":3}"#,
    r#"{"type":"number","multipleOf":2,"minimum":1,"maximum":4}"#,
    r#"{"type":"object","minProperties":1,"maxProperties":2}"#,
    r#"{"type":"object","required":["a","b"]}"#,
    r#"{"type":"object","properties":{"a":{"type":"number"},"b":{"type":"string"}}}"#,
    r#"{"type":"object","patternProperties":{"a|b":{"type":"array"}},"additionalProperties":{"type":"number"}}"#,
    r#"{"type":"object","properties":{"a":{}},"additionalProperties":false}"#,
    r#"{"type":"array","items":[{"type":"number"},{"type":"string"}]}"#,
    r#"{"type":"array","items":[{"type":"number"}],"additionalItems":{"type":"object"}}"#,
    r#"{"type":"array","items":[],"additionalItems":{"type":"number","maximum":2}}"#,
    r#"{"type":"array","uniqueItems":true}"#,
    r#"{"type":"array","uniqueItems":false,"items":[{},{}],"additionalItems":{}}"#,
    r#"{"allOf":[{"type":"object","required":["a"]},{"type":"object","maxProperties":1}]}"#,
    r#"{"anyOf":[{"type":"string","pattern":"x|y"},{"type":"number","maximum":1}]}"#,
    r#"{"not":{"type":"array"}}"#,
    r#"{"enum":["x",1,{"a":[]},[0,"y"]]}"#,
    r##"{"definitions":{"node":{"anyOf":[{"type":"number"},{"type":"array","items":[],"additionalItems":{"$ref":"#/definitions/node"}}]}},"$ref":"#/definitions/node"}"##,
    r##"{"definitions":{"ev":{"type":"object","additionalProperties":{"$ref":"#/definitions/od"}},"od":{"type":"object","minProperties":1,"additionalProperties":{"$ref":"#/definitions/ev"}}},"$ref":"#/definitions/ev"}"##,
    r#"{"type":"object","properties":{"a":{"type":"array","uniqueItems":true,"items":[{"enum":[0,1]}],"additionalItems":{"not":{"type":"string"}}}},"patternProperties":{"c+":{"type":"object","required":["a"]}},"required":["a"]}"#,
    r#"{"type":"object","properties":{"b":{"type":"number","multipleOf":0}},"additionalProperties":{"anyOf":[{"type":"string"},{"type":"object","maxProperties":0}]}}"#,
    r#"true"#,
    r#"false"#,
];

pub const TABLE_KEYWORDS: &[&str] = &[
    "type",
    "pattern",
    "minimum",
    "maximum",
    "multipleOf",
    "minProperties",
    "maxProperties",
    "required",
    "properties",
    "patternProperties",
    "additionalProperties",
    "items",
    "additionalItems",
    "uniqueItems",
    "allOf",
    "anyOf",
    "not",
    "enum",
    "definitions",
    "$ref",
];

/// Every key appearing anywhere in a JSON text.
pub fn keywords_in(text: &str) -> Vec<String> {
    fn walk(v: &serde_json::Value, out: &mut Vec<String>) {
        match v {
            serde_json::Value::Object(m) => {
                for (k, c) in m {
                    out.push(k.clone());
                    walk(c, out);
                }
            }
            serde_json::Value::Array(items) => items.iter().for_each(|c| walk(c, out)),
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(&serde_json::from_str(text).unwrap(), &mut out);
    out
}

/// Documents suited to the corpus: keys, strings and small numbers the
/// schemas mention.
pub fn random_schema_doc(rng: &mut StdRng) -> JsonTree {
    random_tree(rng, 3, 10)
}

/// Truth-table satisfiability of a CNF over named variables.
pub fn cnf_satisfiable(clauses: &[Vec<(usize, bool)>], vars: usize) -> bool {
    (0..1u32 << vars).any(|m| clauses.iter().all(|c| c.iter().any(|&(v, neg)| ((m >> v) & 1 == 1) != neg)))
}

/// Heights of every root-to-leaf path along object edges, on the value.
pub fn object_paths_even(v: &JsonValue) -> bool {
    fn go(v: &JsonValue, len: usize) -> bool {
        match v {
            JsonValue::Obj(m) if !m.is_empty() => m.values().all(|c| go(c, len + 1)),
            _ => len.is_multiple_of(2),
        }
    }
    go(v, 0)
}

/// Every object tree of height at most `h` whose children are keyed by a
/// subset of `keys`, leaves being `{}`.
pub fn object_trees(h: usize, keys: &[&str]) -> Vec<JsonValue> {
    if h == 0 {
        return vec![JsonValue::Obj(BTreeMap::new())];
    }
    let smaller = object_trees(h - 1, keys);
    let mut out = vec![BTreeMap::new()];
    for k in keys {
        let mut next = Vec::new();
        for m in &out {
            next.push(m.clone());
            for c in &smaller {
                let mut m = m.clone();
                m.insert(k.to_string(), c.clone());
                next.push(m);
            }
        }
        out = next;
    }
    out.into_iter().map(JsonValue::Obj).collect()
}

/// Every array-only tree of height at most `h` and width at most `w`.
pub fn array_trees(h: usize, w: usize) -> Vec<JsonValue> {
    if h == 0 {
        return vec![JsonValue::Arr(Vec::new())];
    }
    let smaller = array_trees(h - 1, w);
    let mut layer: Vec<Vec<JsonValue>> = vec![Vec::new()];
    let mut out = vec![JsonValue::Arr(Vec::new())];
    for _ in 0..w {
        let mut next = Vec::new();
        for items in &layer {
            for c in &smaller {
                let mut items = items.clone();
                items.push(c.clone());
                out.push(JsonValue::Arr(items.clone()));
                next.push(items);
            }
        }
        layer = next;
    }
    out
}

/// Array trees in which every node has no children or two equal complete
/// children.
pub fn is_complete_binary(v: &JsonValue) -> bool {
    match v {
        JsonValue::Arr(items) if items.is_empty() => true,
        JsonValue::Arr(items) => items.len() == 2 && items[0] == items[1] && is_complete_binary(&items[0]),
        _ => false,
    }
}

/// `{"a":{"a":...{"a":0}}}` with `n` nodes.
pub fn chain(n: usize) -> JsonTree {
    use jsonlogic::tree::{Atom, TreeBuilder};
    use jsonlogic::NodeKind;
    let mut b = TreeBuilder::new();
    let mut cur = b.root(NodeKind::Obj, None);
    for _ in 2..n {
        cur = b.push_key(cur, "a".into(), NodeKind::Obj, None);
    }
    b.push_key(cur, "a".into(), NodeKind::Int, Some(Atom::Int(0)));
    b.finish().unwrap()
}

/// Breadth-first object tree with `n` nodes, children keyed `a`, `b`, `c`.
pub fn balanced(n: usize) -> JsonTree {
    use jsonlogic::tree::TreeBuilder;
    use jsonlogic::NodeKind;
    let mut b = TreeBuilder::new();
    let mut queue = std::collections::VecDeque::from([b.root(NodeKind::Obj, None)]);
    let mut count = 1;
    while count < n {
        let p = queue.pop_front().unwrap();
        for k in KEYS {
            if count == n {
                break;
            }
            queue.push_back(b.push_key(p, k.to_string(), NodeKind::Obj, None));
            count += 1;
        }
    }
    b.finish().unwrap()
}
