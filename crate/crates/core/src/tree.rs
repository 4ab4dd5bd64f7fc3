//! JSON trees: a prefix-closed tree domain partitioned into object, array,
//! string and number nodes, with key-labelled object edges and
//! position-labelled array edges.
//!
//! Nodes live in an arena in preorder. Object children are stored in
//! lexicographic key order, so a tree's child ordinals (and its canonical
//! serialization) do not depend on member order in the source text.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::de::{self, Deserialize, Deserializer, MapAccess, SeqAccess, Visitor};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("duplicate key {0:?} in object")]
    DuplicateKey(String),
    #[error("number {0} is not a natural number")]
    NonNaturalNumber(String),
    #[error("malformed JSON: {0}")]
    MalformedSyntax(String),
    #[error("unsupported value `{0}` (only objects, arrays, strings and naturals are allowed)")]
    UnsupportedValue(&'static str),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Obj,
    Arr,
    Str,
    Int,
}

impl NodeKind {
    /// Rank used when ordering candidate documents: objects first.
    pub fn rank(self) -> u8 {
        match self {
            NodeKind::Obj => 0,
            NodeKind::Arr => 1,
            NodeKind::Str => 2,
            NodeKind::Int => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Str(String),
    Int(u64),
}

/// A node as a path of child ordinals from the root (an element of the tree
/// domain). The empty path is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeId(pub Vec<usize>);

impl NodeId {
    pub fn root() -> Self {
        NodeId(Vec::new())
    }

    pub fn child(&self, ordinal: usize) -> Self {
        let mut path = self.0.clone();
        path.push(ordinal);
        NodeId(path)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// Arena index of a node. Preorder: the root is 0 and every node precedes
/// its descendants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIx(pub(crate) u32);

impl NodeIx {
    pub const ROOT: NodeIx = NodeIx(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        NodeIx(i as u32)
    }
}

/// One JSON navigation instruction. Array indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NavInstruction {
    Key(String),
    Index(usize),
}

/// Label of the edge entering a node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Key(String),
    /// 1-based position.
    Index(usize),
}

#[derive(Debug, Clone)]
struct NodeData {
    kind: NodeKind,
    parent: Option<NodeIx>,
    ordinal: usize,
    label: Option<EdgeLabel>,
    children: Vec<NodeIx>,
    atom: Option<Atom>,
    fingerprint: u64,
    height: usize,
}

/// An immutable JSON tree.
#[derive(Clone)]
pub struct JsonTree {
    nodes: Vec<NodeData>,
    canonical: OnceLock<String>,
}

impl fmt::Debug for JsonTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JsonTree({})", self.canonical())
    }
}

impl PartialEq for JsonTree {
    fn eq(&self, other: &Self) -> bool {
        subtree_eq(self, NodeIx::ROOT, other, NodeIx::ROOT)
    }
}

impl Eq for JsonTree {}

impl Hash for JsonTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.fingerprint(NodeIx::ROOT).hash(state);
    }
}

impl JsonTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> NodeIx {
        NodeIx::ROOT
    }

    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = NodeIx> + ExactSizeIterator {
        (0..self.nodes.len() as u32).map(NodeIx)
    }

    pub fn kind(&self, n: NodeIx) -> NodeKind {
        self.nodes[n.index()].kind
    }

    pub fn atom(&self, n: NodeIx) -> Option<&Atom> {
        self.nodes[n.index()].atom.as_ref()
    }

    pub fn str_value(&self, n: NodeIx) -> Option<&str> {
        match self.atom(n) {
            Some(Atom::Str(s)) => Some(s),
            _ => None,
        }
    }

    pub fn int_value(&self, n: NodeIx) -> Option<u64> {
        match self.atom(n) {
            Some(Atom::Int(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn parent(&self, n: NodeIx) -> Option<NodeIx> {
        self.nodes[n.index()].parent
    }

    pub fn children(&self, n: NodeIx) -> &[NodeIx] {
        &self.nodes[n.index()].children
    }

    /// Label of the edge from the parent, `None` at the root.
    pub fn label(&self, n: NodeIx) -> Option<&EdgeLabel> {
        self.nodes[n.index()].label.as_ref()
    }

    pub fn key(&self, n: NodeIx) -> Option<&str> {
        match self.label(n) {
            Some(EdgeLabel::Key(k)) => Some(k),
            _ => None,
        }
    }

    /// 1-based array position of `n` in its parent, if the parent is an array.
    pub fn position(&self, n: NodeIx) -> Option<usize> {
        match self.label(n) {
            Some(EdgeLabel::Index(i)) => Some(*i),
            _ => None,
        }
    }

    /// Height of the subtree rooted at `n`.
    pub fn node_height(&self, n: NodeIx) -> usize {
        self.nodes[n.index()].height
    }

    /// Structural fingerprint of `json(n)`; equal subtrees have equal fingerprints.
    pub fn fingerprint(&self, n: NodeIx) -> u64 {
        self.nodes[n.index()].fingerprint
    }

    /// Child of object `n` under key `w`.
    pub fn child_by_key(&self, n: NodeIx, w: &str) -> Option<NodeIx> {
        let data = &self.nodes[n.index()];
        if data.kind != NodeKind::Obj {
            return None;
        }
        data.children
            .binary_search_by(|c| self.key(*c).unwrap_or_default().cmp(w))
            .ok()
            .map(|i| data.children[i])
    }

    /// Child of array `n` at 1-based position `i`.
    pub fn child_by_index(&self, n: NodeIx, i: usize) -> Option<NodeIx> {
        let data = &self.nodes[n.index()];
        if data.kind != NodeKind::Arr || i == 0 {
            return None;
        }
        data.children.get(i - 1).copied()
    }

    /// Tree-domain address of an arena node.
    pub fn path(&self, n: NodeIx) -> NodeId {
        let mut ords = Vec::new();
        let mut cur = n;
        while let Some(p) = self.parent(cur) {
            ords.push(self.nodes[cur.index()].ordinal);
            cur = p;
        }
        ords.reverse();
        NodeId(ords)
    }

    /// Arena node for a tree-domain address.
    pub fn lookup(&self, id: &NodeId) -> Result<NodeIx, TreeError> {
        let mut cur = NodeIx::ROOT;
        for &ord in &id.0 {
            cur = *self
                .children(cur)
                .get(ord)
                .ok_or_else(|| TreeError::UnknownNode(id.clone()))?;
        }
        Ok(cur)
    }

    /// Navigation path as printed by the CLI: `/`-separated keys and 1-based
    /// indices, `(root)` for the root.
    pub fn display_path(&self, n: NodeIx) -> String {
        let mut parts = Vec::new();
        let mut cur = n;
        while let Some(p) = self.parent(cur) {
            parts.push(match self.label(cur) {
                Some(EdgeLabel::Key(k)) => k.clone(),
                Some(EdgeLabel::Index(i)) => i.to_string(),
                None => unreachable!("non-root node without label"),
            });
            cur = p;
        }
        if parts.is_empty() {
            return "(root)".to_string();
        }
        parts.reverse();
        parts.join("/")
    }

    /// Inverse of [`JsonTree::display_path`]: segments are read as keys below
    /// objects and as 1-based indices below arrays.
    pub fn resolve_display_path(&self, path: &str) -> Option<NodeIx> {
        let path = path.trim();
        if path.is_empty() || path == "(root)" {
            return Some(NodeIx::ROOT);
        }
        let mut cur = NodeIx::ROOT;
        for seg in path.split('/') {
            cur = match self.kind(cur) {
                NodeKind::Obj => self.child_by_key(cur, seg)?,
                NodeKind::Arr => self.child_by_index(cur, seg.parse().ok()?)?,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// All object edges `(parent, key, child)`.
    pub fn obj_edges(&self) -> impl Iterator<Item = (NodeIx, &str, NodeIx)> + '_ {
        self.nodes().filter_map(move |c| {
            let key = self.key(c)?;
            Some((self.parent(c)?, key, c))
        })
    }

    /// All array edges `(parent, 1-based index, child)`.
    pub fn arr_edges(&self) -> impl Iterator<Item = (NodeIx, usize, NodeIx)> + '_ {
        self.nodes().filter_map(move |c| {
            let i = self.position(c)?;
            Some((self.parent(c)?, i, c))
        })
    }

    pub fn height(&self) -> usize {
        self.node_height(NodeIx::ROOT)
    }

    /// Canonical text of the whole document, cached.
    pub fn canonical(&self) -> &str {
        self.canonical.get_or_init(|| serialize(self, NodeIx::ROOT))
    }

    pub fn to_value(&self, n: NodeIx) -> JsonValue {
        match self.kind(n) {
            NodeKind::Obj => JsonValue::Obj(
                self.children(n)
                    .iter()
                    .map(|&c| (self.key(c).unwrap().to_string(), self.to_value(c)))
                    .collect(),
            ),
            NodeKind::Arr => {
                JsonValue::Arr(self.children(n).iter().map(|&c| self.to_value(c)).collect())
            }
            NodeKind::Str => JsonValue::Str(self.str_value(n).unwrap().to_string()),
            NodeKind::Int => JsonValue::Int(self.int_value(n).unwrap()),
        }
    }

    /// Checks the five structural conditions of a JSON tree plus the
    /// prefix-closure of the domain. Returns a description of the first
    /// violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("empty domain".into());
        }
        if self.nodes[0].parent.is_some() {
            return Err("root has a parent".into());
        }
        for n in self.nodes() {
            let d = &self.nodes[n.index()];
            for (ord, &c) in d.children.iter().enumerate() {
                let cd = &self.nodes[c.index()];
                if cd.parent != Some(n) || cd.ordinal != ord {
                    return Err(format!("child {c:?} of {n:?} has inconsistent parent/ordinal"));
                }
                if c.index() <= n.index() {
                    return Err(format!("child {c:?} precedes parent {n:?} in preorder"));
                }
            }
            match d.kind {
                NodeKind::Obj => {
                    // condition 1 and 2: one key per child, keys unique
                    let mut prev: Option<&str> = None;
                    for &c in &d.children {
                        let key = self
                            .key(c)
                            .ok_or_else(|| format!("object child {c:?} has no key"))?;
                        if let Some(p) = prev {
                            if p >= key {
                                return Err(format!("object {n:?} keys not unique/sorted at {key:?}"));
                            }
                        }
                        prev = Some(key);
                    }
                    if d.atom.is_some() {
                        return Err(format!("object {n:?} carries a value"));
                    }
                }
                NodeKind::Arr => {
                    // condition 3
                    for (ord, &c) in d.children.iter().enumerate() {
                        if self.position(c) != Some(ord + 1) {
                            return Err(format!("array child {c:?} has wrong index label"));
                        }
                    }
                    if d.atom.is_some() {
                        return Err(format!("array {n:?} carries a value"));
                    }
                }
                NodeKind::Str | NodeKind::Int => {
                    // condition 4 and 5
                    if !d.children.is_empty() {
                        return Err(format!("leaf {n:?} has children"));
                    }
                    match (d.kind, &d.atom) {
                        (NodeKind::Str, Some(Atom::Str(_))) | (NodeKind::Int, Some(Atom::Int(_))) => {}
                        _ => return Err(format!("leaf {n:?} has a missing or mistyped value")),
                    }
                }
            }
        }
        // every non-root node is reachable from the root exactly once
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![NodeIx::ROOT];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.index()], true) {
                return Err(format!("node {n:?} reached twice"));
            }
            stack.extend(self.children(n).iter().copied());
        }
        if seen.iter().any(|s| !s) {
            return Err("unreachable node in arena".into());
        }
        Ok(())
    }
}

/// An owned JSON value of the model (objects, arrays, strings, naturals).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JsonValue {
    Obj(BTreeMap<String, JsonValue>),
    Arr(Vec<JsonValue>),
    Str(String),
    Int(u64),
}

impl JsonValue {
    pub fn kind(&self) -> NodeKind {
        match self {
            JsonValue::Obj(_) => NodeKind::Obj,
            JsonValue::Arr(_) => NodeKind::Arr,
            JsonValue::Str(_) => NodeKind::Str,
            JsonValue::Int(_) => NodeKind::Int,
        }
    }

    pub fn to_tree(&self) -> JsonTree {
        let mut b = TreeBuilder::new();
        let mut stack = vec![(None, self)];
        while let Some((slot, v)) = stack.pop() {
            let ix = match slot {
                None => b.root(v.kind(), leaf_atom(v)),
                Some((parent, Some(key))) => b.push_key(parent, key, v.kind(), leaf_atom(v)),
                Some((parent, None)) => b.push_item(parent, v.kind(), leaf_atom(v)),
            };
            match v {
                JsonValue::Obj(m) => {
                    for (k, c) in m.iter().rev() {
                        stack.push((Some((ix, Some(k.clone()))), c));
                    }
                }
                JsonValue::Arr(items) => {
                    // pushed in reverse so items are appended in order
                    for c in items.iter().rev() {
                        stack.push((Some((ix, None)), c));
                    }
                }
                _ => {}
            }
        }
        b.finish().expect("a JsonValue has unique keys by construction")
    }
}

fn leaf_atom(v: &JsonValue) -> Option<Atom> {
    match v {
        JsonValue::Str(s) => Some(Atom::Str(s.clone())),
        JsonValue::Int(i) => Some(Atom::Int(*i)),
        _ => None,
    }
}

/// Incremental construction of a [`JsonTree`]; `finish` sorts object
/// children, renumbers nodes in preorder and computes fingerprints.
#[derive(Default)]
pub struct TreeBuilder {
    kinds: Vec<NodeKind>,
    atoms: Vec<Option<Atom>>,
    parents: Vec<Option<usize>>,
    keys: Vec<Option<String>>,
    children: Vec<Vec<usize>>,
}

/// Handle to a node under construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildIx(usize);

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn add(&mut self, parent: Option<usize>, key: Option<String>, kind: NodeKind, atom: Option<Atom>) -> BuildIx {
        let ix = self.kinds.len();
        self.kinds.push(kind);
        self.atoms.push(atom);
        self.parents.push(parent);
        self.keys.push(key);
        self.children.push(Vec::new());
        if let Some(p) = parent {
            self.children[p].push(ix);
        }
        BuildIx(ix)
    }

    pub fn root(&mut self, kind: NodeKind, atom: Option<Atom>) -> BuildIx {
        assert!(self.kinds.is_empty(), "root already set");
        self.add(None, None, kind, atom)
    }

    pub fn push_key(&mut self, parent: BuildIx, key: String, kind: NodeKind, atom: Option<Atom>) -> BuildIx {
        debug_assert_eq!(self.kinds[parent.0], NodeKind::Obj);
        self.add(Some(parent.0), Some(key), kind, atom)
    }

    pub fn push_item(&mut self, parent: BuildIx, kind: NodeKind, atom: Option<Atom>) -> BuildIx {
        debug_assert_eq!(self.kinds[parent.0], NodeKind::Arr);
        self.add(Some(parent.0), None, kind, atom)
    }

    pub fn finish(mut self) -> Result<JsonTree, TreeError> {
        assert!(!self.kinds.is_empty(), "tree without root");
        for i in 0..self.kinds.len() {
            if self.kinds[i] == NodeKind::Obj {
                let mut ch = std::mem::take(&mut self.children[i]);
                ch.sort_by(|a, b| self.keys[*a].cmp(&self.keys[*b]));
                for w in ch.windows(2) {
                    if self.keys[w[0]] == self.keys[w[1]] {
                        return Err(TreeError::DuplicateKey(self.keys[w[0]].clone().unwrap_or_default()));
                    }
                }
                self.children[i] = ch;
            }
        }
        // preorder renumbering
        let mut order = Vec::with_capacity(self.kinds.len());
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            order.push(n);
            stack.extend(self.children[n].iter().rev().copied());
        }
        let mut new_ix = vec![0u32; self.kinds.len()];
        for (new, &old) in order.iter().enumerate() {
            new_ix[old] = new as u32;
        }
        let mut nodes: Vec<NodeData> = Vec::with_capacity(order.len());
        for &old in &order {
            let parent = self.parents[old].map(|p| NodeIx(new_ix[p]));
            let (ordinal, label) = match self.parents[old] {
                None => (0, None),
                Some(p) => {
                    let ord = self.children[p].iter().position(|&c| c == old).unwrap();
                    let label = match self.kinds[p] {
                        NodeKind::Obj => EdgeLabel::Key(self.keys[old].clone().unwrap_or_default()),
                        _ => EdgeLabel::Index(ord + 1),
                    };
                    (ord, Some(label))
                }
            };
            nodes.push(NodeData {
                kind: self.kinds[old],
                parent,
                ordinal,
                label,
                children: self.children[old].iter().map(|&c| NodeIx(new_ix[c])).collect(),
                atom: self.atoms[old].take(),
                fingerprint: 0,
                height: 0,
            });
        }
        // children have larger preorder indices than their parent
        for i in (0..nodes.len()).rev() {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            let d = &nodes[i];
            d.kind.hash(&mut h);
            d.atom.hash(&mut h);
            let mut height = 0;
            for &c in &d.children {
                let cd = &nodes[c.index()];
                if let Some(EdgeLabel::Key(k)) = &cd.label {
                    k.hash(&mut h);
                }
                cd.fingerprint.hash(&mut h);
                height = height.max(cd.height + 1);
            }
            let fp = h.finish();
            nodes[i].fingerprint = fp;
            nodes[i].height = height;
        }
        Ok(JsonTree { nodes, canonical: OnceLock::new() })
    }
}

/// Intermediate value that keeps everything the text contained, so that
/// duplicates, signs, fractions and literals can be reported precisely.
enum Raw {
    Obj(Vec<(String, Raw)>),
    Arr(Vec<Raw>),
    Str(String),
    Nat(u64),
    Neg(i64),
    Float(f64),
    Bool,
    Null,
}

impl<'de> Deserialize<'de> for Raw {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RawVisitor;
        impl<'de> Visitor<'de> for RawVisitor {
            type Value = Raw;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON value")
            }
            fn visit_bool<E: de::Error>(self, _: bool) -> Result<Raw, E> {
                Ok(Raw::Bool)
            }
            fn visit_unit<E: de::Error>(self) -> Result<Raw, E> {
                Ok(Raw::Null)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Raw, E> {
                Ok(Raw::Nat(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Raw, E> {
                Ok(if v >= 0 { Raw::Nat(v as u64) } else { Raw::Neg(v) })
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Raw, E> {
                Ok(Raw::Float(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Raw, E> {
                Ok(Raw::Str(v.to_owned()))
            }
            fn visit_string<E: de::Error>(self, v: String) -> Result<Raw, E> {
                Ok(Raw::Str(v))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Raw, A::Error> {
                let mut items = Vec::new();
                while let Some(v) = seq.next_element()? {
                    items.push(v);
                }
                Ok(Raw::Arr(items))
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Raw, A::Error> {
                let mut members = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Raw>()? {
                    members.push((k, v));
                }
                Ok(Raw::Obj(members))
            }
        }
        d.deserialize_any(RawVisitor)
    }
}

/// Parses JSON text in the model's fragment into a [`JsonTree`].
pub fn parse_document(text: &str) -> Result<JsonTree, TreeError> {
    let raw: Raw = serde_json::from_str(text).map_err(|e| TreeError::MalformedSyntax(e.to_string()))?;
    let mut b = TreeBuilder::new();
    let mut stack: Vec<(Option<(BuildIx, Option<String>)>, Raw)> = vec![(None, raw)];
    while let Some((slot, raw)) = stack.pop() {
        let (kind, atom) = match &raw {
            Raw::Obj(_) => (NodeKind::Obj, None),
            Raw::Arr(_) => (NodeKind::Arr, None),
            Raw::Str(s) => (NodeKind::Str, Some(Atom::Str(s.clone()))),
            Raw::Nat(n) => (NodeKind::Int, Some(Atom::Int(*n))),
            Raw::Neg(v) => return Err(TreeError::NonNaturalNumber(v.to_string())),
            Raw::Float(v) => return Err(TreeError::NonNaturalNumber(v.to_string())),
            Raw::Bool => return Err(TreeError::UnsupportedValue("true/false")),
            Raw::Null => return Err(TreeError::UnsupportedValue("null")),
        };
        let ix = match slot {
            None => b.root(kind, atom),
            Some((p, Some(k))) => b.push_key(p, k, kind, atom),
            Some((p, None)) => b.push_item(p, kind, atom),
        };
        match raw {
            Raw::Obj(members) => {
                let mut seen = std::collections::HashSet::new();
                for (k, _) in &members {
                    if !seen.insert(k.as_str()) {
                        return Err(TreeError::DuplicateKey(k.clone()));
                    }
                }
                for (k, v) in members.into_iter().rev() {
                    stack.push((Some((ix, Some(k))), v));
                }
            }
            Raw::Arr(items) => {
                for v in items.into_iter().rev() {
                    stack.push((Some((ix, None)), v));
                }
            }
            _ => {}
        }
    }
    b.finish()
}

pub(crate) fn write_json_string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}

/// Canonical text of `json(n)`: no whitespace, object keys in lexicographic
/// order.
pub fn serialize(tree: &JsonTree, n: NodeIx) -> String {
    let mut out = String::new();
    write_canonical(tree, n, &mut out);
    out
}

fn write_canonical(tree: &JsonTree, n: NodeIx, out: &mut String) {
    match tree.kind(n) {
        NodeKind::Obj => {
            out.push('{');
            for (i, &c) in tree.children(n).iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json_string(out, tree.key(c).unwrap());
                out.push(':');
                write_canonical(tree, c, out);
            }
            out.push('}');
        }
        NodeKind::Arr => {
            out.push('[');
            for (i, &c) in tree.children(n).iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(tree, c, out);
            }
            out.push(']');
        }
        NodeKind::Str => write_json_string(out, tree.str_value(n).unwrap()),
        NodeKind::Int => out.push_str(&tree.int_value(n).unwrap().to_string()),
    }
}

/// `json(n)` as a standalone tree.
pub fn subtree(tree: &JsonTree, n: &NodeId) -> Result<JsonTree, TreeError> {
    let ix = tree.lookup(n)?;
    Ok(subtree_at(tree, ix))
}

pub fn subtree_at(tree: &JsonTree, n: NodeIx) -> JsonTree {
    if n == NodeIx::ROOT {
        return tree.clone();
    }
    // preorder makes the subtree a contiguous arena range
    let start = n.index();
    let mut end = start + 1;
    // the first node past the subtree hangs below an ancestor of `n`
    while end < tree.nodes.len() && tree.nodes[end].parent.is_some_and(|p| p.index() >= start) {
        end += 1;
    }
    let offset = start as u32;
    let nodes = tree.nodes[start..end]
        .iter()
        .enumerate()
        .map(|(i, d)| NodeData {
            kind: d.kind,
            parent: if i == 0 { None } else { d.parent.map(|p| NodeIx(p.0 - offset)) },
            ordinal: if i == 0 { 0 } else { d.ordinal },
            label: if i == 0 { None } else { d.label.clone() },
            children: d.children.iter().map(|c| NodeIx(c.0 - offset)).collect(),
            atom: d.atom.clone(),
            fingerprint: d.fingerprint,
            height: d.height,
        })
        .collect();
    JsonTree { nodes, canonical: OnceLock::new() }
}

/// Structural equality of `json(n1)` and `json(n2)` within one tree.
pub fn structural_equal(tree: &JsonTree, n1: &NodeId, n2: &NodeId) -> Result<bool, TreeError> {
    let a = tree.lookup(n1)?;
    let b = tree.lookup(n2)?;
    Ok(subtree_eq(tree, a, tree, b))
}

/// Structural equality of two subtrees, possibly of different trees.
/// Fingerprints reject most unequal pairs; equal fingerprints are confirmed
/// by a full comparison.
pub fn subtree_eq(t1: &JsonTree, n1: NodeIx, t2: &JsonTree, n2: NodeIx) -> bool {
    if t1.fingerprint(n1) != t2.fingerprint(n2) {
        return false;
    }
    let mut stack = vec![(n1, n2)];
    while let Some((a, b)) = stack.pop() {
        if t1.kind(a) != t2.kind(b) || t1.atom(a) != t2.atom(b) {
            return false;
        }
        let (ca, cb) = (t1.children(a), t2.children(b));
        if ca.len() != cb.len() {
            return false;
        }
        for (&x, &y) in ca.iter().zip(cb) {
            if t1.label(x) != t2.label(y) {
                return false;
            }
            stack.push((x, y));
        }
    }
    true
}

/// Follows navigation instructions from the root.
pub fn navigate(tree: &JsonTree, instrs: &[NavInstruction]) -> Option<NodeIx> {
    let mut cur = NodeIx::ROOT;
    for ins in instrs {
        cur = match ins {
            NavInstruction::Key(w) => tree.child_by_key(cur, w)?,
            NavInstruction::Index(i) => tree.child_by_index(cur, *i)?,
        };
    }
    Some(cur)
}

pub fn height(tree: &JsonTree) -> usize {
    tree.height()
}

/// A set of nodes of one tree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet(FixedBitSet);

impl NodeSet {
    pub fn empty(tree: &JsonTree) -> Self {
        NodeSet(FixedBitSet::with_capacity(tree.len()))
    }

    pub fn full(tree: &JsonTree) -> Self {
        let mut b = FixedBitSet::with_capacity(tree.len());
        b.insert_range(..);
        NodeSet(b)
    }

    pub fn insert(&mut self, n: NodeIx) -> bool {
        !self.0.put(n.index())
    }

    pub fn contains(&self, n: NodeIx) -> bool {
        self.0.contains(n.index())
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeIx> + '_ {
        self.0.ones().map(NodeIx::from_index)
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &NodeSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &NodeSet) {
        self.0.difference_with(&other.0);
    }

    pub fn complement(&self) -> NodeSet {
        let mut b = self.0.clone();
        b.toggle_range(..);
        NodeSet(b)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Members as tree-domain addresses, in preorder.
    pub fn paths(&self, tree: &JsonTree) -> Vec<NodeId> {
        self.iter().map(|n| tree.path(n)).collect()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|n| n.0)).finish()
    }
}

impl JsonTree {
    /// Assigns every node the id of its structural-equality class: two
    /// nodes get the same id iff their subtrees are equal JSON values.
    pub fn equality_classes(&self) -> Vec<u32> {
        let mut by_fp: std::collections::HashMap<u64, Vec<(NodeIx, u32)>> = Default::default();
        let mut next = 0u32;
        let mut out = vec![0u32; self.len()];
        for n in self.nodes() {
            let bucket = by_fp.entry(self.fingerprint(n)).or_default();
            let class = match bucket.iter().find(|(m, _)| subtree_eq(self, *m, self, n)) {
                Some(&(_, c)) => c,
                None => {
                    next += 1;
                    bucket.push((n, next - 1));
                    next - 1
                }
            };
            out[n.index()] = class;
        }
        out
    }

    /// True iff `n` is an array whose children are pairwise distinct values.
    pub fn children_distinct(&self, n: NodeIx) -> bool {
        let mut ch: Vec<NodeIx> = self.children(n).to_vec();
        ch.sort_by_key(|&c| self.fingerprint(c));
        for i in 0..ch.len() {
            let mut j = i + 1;
            while j < ch.len() && self.fingerprint(ch[j]) == self.fingerprint(ch[i]) {
                if subtree_eq(self, ch[i], self, ch[j]) {
                    return false;
                }
                j += 1;
            }
        }
        true
    }
}
