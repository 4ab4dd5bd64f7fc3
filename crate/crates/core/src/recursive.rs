//! Recursive JSL: named definitions that may refer to each other, plus a
//! base formula. An expression is well formed when every cycle of symbol
//! references passes through a modal operator.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::jsl::parse::formula;
use crate::jsl::eval::TreeNode;
use crate::jsl::{node_test_holds, JslFormula};
use crate::syntax::{Cursor, SyntaxError};
use crate::tree::{JsonTree, NodeIx, NodeKind, NodeSet};

pub const DEFAULT_UNFOLD_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecursiveError {
    #[error("malformed expression {0}")]
    Malformed(#[from] SyntaxError),
    #[error("undefined symbol `{0}`")]
    UndefinedSymbol(String),
    #[error("symbol `{0}` defined twice")]
    DuplicateDefinition(String),
    #[error("ill-formed recursion: {}", .0.join(" -> "))]
    IllFormed(Vec<String>),
    #[error("unfolding exceeds {0} formula nodes")]
    UnfoldTooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveJsl {
    pub definitions: Vec<(String, JslFormula)>,
    pub base: JslFormula,
}

/// Edge `i -> j` when symbol `j` occurs in the body of `i` outside every
/// modal operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecedenceGraph {
    pub symbols: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl PrecedenceGraph {
    /// A cycle as a list of symbols whose last element repeats the first,
    /// if there is one.
    pub fn find_cycle(&self) -> Option<Vec<String>> {
        let n = self.symbols.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; n];
        let mut stack: Vec<usize> = Vec::new();
        fn dfs(v: usize, adj: &[Vec<usize>], color: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
            color[v] = 1;
            stack.push(v);
            for &w in &adj[v] {
                if color[w] == 1 {
                    let start = stack.iter().position(|&x| x == w).unwrap();
                    let mut cycle = stack[start..].to_vec();
                    cycle.push(w);
                    return Some(cycle);
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
        for v in 0..n {
            if color[v] == 0 {
                if let Some(c) = dfs(v, &adj, &mut color, &mut stack) {
                    return Some(c.into_iter().map(|i| self.symbols[i].clone()).collect());
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Symbols ordered so that each comes after everything it depends on.
    pub fn dependency_order(&self) -> Option<Vec<usize>> {
        let n = self.symbols.len();
        let mut pending = vec![0usize; n];
        let mut users = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            pending[a] += 1;
            users[b].push(a);
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &u in &users[v] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push(u);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

impl fmt::Display for PrecedenceGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "symbols: {}", self.symbols.join(", "))?;
        if self.edges.is_empty() {
            return writeln!(f, "edges: none");
        }
        writeln!(f, "edges:")?;
        for &(a, b) in &self.edges {
            writeln!(f, "  {} -> {}", self.symbols[a], self.symbols[b])?;
        }
        Ok(())
    }
}

/// Parses `let g1 = <jsl>; let g2 = <jsl>; in <jsl>`. A plain JSL formula
/// is an expression without definitions.
pub fn parse_rjsl(text: &str) -> Result<RecursiveJsl, RecursiveError> {
    let mut c = Cursor::new(text);
    let mut definitions: Vec<(String, JslFormula)> = Vec::new();
    let has_lets = {
        let save = c.pos;
        let found = c.eat_keyword("let");
        c.pos = save;
        found
    };
    while c.eat_keyword("let") {
        let at = c.pos;
        let name = match c.ident() {
            Some(n) if !is_reserved(n) => n.to_string(),
            _ => return Err(SyntaxError { offset: at, message: "expected a symbol name".into() }.into()),
        };
        c.expect("=")?;
        let body = formula(&mut c)?;
        c.expect(";")?;
        if definitions.iter().any(|(n, _)| *n == name) {
            return Err(RecursiveError::DuplicateDefinition(name));
        }
        definitions.push((name, body));
    }
    if has_lets && !c.eat_keyword("in") {
        c.err("expected `in` before the base formula")?;
    }
    let base = formula(&mut c)?;
    if !c.at_end() {
        c.err("unexpected trailing input")?;
    }
    let expr = RecursiveJsl { definitions, base };
    expr.check_symbols()?;
    Ok(expr)
}

pub(crate) fn is_reserved(name: &str) -> bool {
    crate::jsl::parse::RESERVED.contains(&name)
}

impl RecursiveJsl {
    pub fn plain(base: JslFormula) -> Self {
        RecursiveJsl { definitions: Vec::new(), base }
    }

    fn index(&self) -> HashMap<&str, usize> {
        self.definitions.iter().enumerate().map(|(i, (n, _))| (n.as_str(), i)).collect()
    }

    /// Every used symbol is defined.
    pub fn check_symbols(&self) -> Result<(), RecursiveError> {
        let idx = self.index();
        let mut missing = None;
        let mut check = |name: &str, _| {
            if !idx.contains_key(name) && missing.is_none() {
                missing = Some(name.to_string());
            }
        };
        for (_, body) in &self.definitions {
            body.visit_vars(0, &mut check);
        }
        self.base.visit_vars(0, &mut check);
        match missing {
            Some(m) => Err(RecursiveError::UndefinedSymbol(m)),
            None => Ok(()),
        }
    }

    pub fn size(&self) -> usize {
        self.base.size() + self.definitions.iter().map(|(_, b)| b.size()).sum::<usize>()
    }
}

impl fmt::Display for RecursiveJsl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, body) in &self.definitions {
            write!(f, "let {name} = {body}; ")?;
        }
        if !self.definitions.is_empty() {
            f.write_str("in ")?;
        }
        write!(f, "{}", self.base)
    }
}

pub fn precedence_graph(expr: &RecursiveJsl) -> PrecedenceGraph {
    let idx = expr.index();
    let mut edges = Vec::new();
    for (i, (_, body)) in expr.definitions.iter().enumerate() {
        body.visit_vars(0, &mut |name, depth| {
            if depth == 0 {
                if let Some(&j) = idx.get(name) {
                    if !edges.contains(&(i, j)) {
                        edges.push((i, j));
                    }
                }
            }
        });
    }
    PrecedenceGraph { symbols: expr.definitions.iter().map(|(n, _)| n.clone()).collect(), edges }
}

pub fn is_well_formed(expr: &RecursiveJsl) -> bool {
    expr.check_symbols().is_ok() && precedence_graph(expr).is_acyclic()
}

fn require_well_formed(expr: &RecursiveJsl) -> Result<Vec<usize>, RecursiveError> {
    expr.check_symbols()?;
    let g = precedence_graph(expr);
    match g.dependency_order() {
        Some(order) => Ok(order),
        None => Err(RecursiveError::IllFormed(g.find_cycle().unwrap_or_default())),
    }
}

/// Replaces symbols by their definitions until every remaining occurrence
/// sits under at least `h + 1` modal operators, then replaces those by
/// `false`.
pub fn unfold(expr: &RecursiveJsl, h: usize) -> Result<JslFormula, RecursiveError> {
    unfold_with_cap(expr, h, DEFAULT_UNFOLD_CAP)
}

pub fn unfold_with_cap(expr: &RecursiveJsl, h: usize, cap: usize) -> Result<JslFormula, RecursiveError> {
    require_well_formed(expr)?;
    let idx = expr.index();
    let mut budget = cap;
    unfold_at(expr, &idx, &expr.base, 0, h, &mut budget, cap)
}

fn unfold_at(
    expr: &RecursiveJsl,
    idx: &HashMap<&str, usize>,
    phi: &JslFormula,
    depth: usize,
    h: usize,
    budget: &mut usize,
    cap: usize,
) -> Result<JslFormula, RecursiveError> {
    if *budget == 0 {
        return Err(RecursiveError::UnfoldTooLarge(cap));
    }
    *budget -= 1;
    let mut go = |a: &JslFormula, d: usize| unfold_at(expr, idx, a, d, h, budget, cap).map(Box::new);
    Ok(match phi {
        JslFormula::Var(v) if depth > h => JslFormula::falsum(),
        JslFormula::Var(v) => {
            let body = &expr.definitions[idx[v.as_str()]].1;
            *go(body, depth)?
        }
        JslFormula::True | JslFormula::Test(_) => phi.clone(),
        JslFormula::Not(a) => JslFormula::Not(go(a, depth)?),
        JslFormula::And(a, b) => JslFormula::And(go(a, depth)?, go(b, depth)?),
        JslFormula::Or(a, b) => JslFormula::Or(go(a, depth)?, go(b, depth)?),
        JslFormula::BoxKey(e, a) => JslFormula::BoxKey(e.clone(), go(a, depth + 1)?),
        JslFormula::DiaKey(e, a) => JslFormula::DiaKey(e.clone(), go(a, depth + 1)?),
        JslFormula::BoxIdx(i, j, a) => JslFormula::BoxIdx(*i, *j, go(a, depth + 1)?),
        JslFormula::DiaIdx(i, j, a) => JslFormula::DiaIdx(*i, *j, go(a, depth + 1)?),
    })
}

/// Per-node truth values of every definition, computed bottom-up.
struct Table {
    values: Vec<FixedBitSet>,
}

fn holds(t: &JsonTree, n: NodeIx, phi: &JslFormula, idx: &HashMap<&str, usize>, table: &Table) -> bool {
    let go = |c: NodeIx, a: &JslFormula| holds(t, c, a, idx, table);
    match phi {
        JslFormula::True => true,
        JslFormula::Var(v) => table.values[idx[v.as_str()]].contains(n.index()),
        JslFormula::Not(a) => !go(n, a),
        JslFormula::And(a, b) => go(n, a) && go(n, b),
        JslFormula::Or(a, b) => go(n, a) || go(n, b),
        JslFormula::Test(test) => node_test_holds(test, &TreeNode { tree: t, n }),
        JslFormula::BoxKey(e, a) | JslFormula::DiaKey(e, a) => {
            let universal = matches!(phi, JslFormula::BoxKey(..));
            if t.kind(n) != NodeKind::Obj {
                return universal;
            }
            let mut selected = t.children(n).iter().filter(|&&c| e.matches(t.key(c).unwrap()));
            if universal {
                selected.all(|&c| go(c, a))
            } else {
                selected.any(|&c| go(c, a))
            }
        }
        JslFormula::BoxIdx(i, j, a) | JslFormula::DiaIdx(i, j, a) => {
            let universal = matches!(phi, JslFormula::BoxIdx(..));
            if t.kind(n) != NodeKind::Arr {
                return universal;
            }
            let ch = t.children(n);
            let lo = (*i - 1).min(ch.len());
            let hi = j.map_or(ch.len(), |j| j.min(ch.len())).max(lo);
            let mut selected = ch[lo..hi].iter();
            if universal {
                selected.all(|&c| go(c, a))
            } else {
                selected.any(|&c| go(c, a))
            }
        }
    }
}

fn compute_table(expr: &RecursiveJsl, t: &JsonTree, order: &[usize]) -> Table {
    let idx = expr.index();
    let mut table = Table { values: vec![FixedBitSet::with_capacity(t.len()); expr.definitions.len()] };
    // reverse preorder visits children before parents; within a node,
    // definitions are evaluated after those they reference directly
    for n in t.nodes().rev() {
        for &d in order {
            if holds(t, n, &expr.definitions[d].1, &idx, &table) {
                table.values[d].insert(n.index());
            }
        }
    }
    table
}

/// Nodes at which the base formula holds.
pub fn eval_recursive_set(expr: &RecursiveJsl, t: &JsonTree) -> Result<NodeSet, RecursiveError> {
    let order = require_well_formed(expr)?;
    let table = compute_table(expr, t, &order);
    let idx = expr.index();
    let mut out = NodeSet::empty(t);
    for n in t.nodes() {
        if holds(t, n, &expr.base, &idx, &table) {
            out.insert(n);
        }
    }
    Ok(out)
}

/// Whether the document satisfies the expression at its root.
pub fn eval_recursive(expr: &RecursiveJsl, t: &JsonTree) -> Result<bool, RecursiveError> {
    let order = require_well_formed(expr)?;
    let table = compute_table(expr, t, &order);
    Ok(holds(t, t.root(), &expr.base, &expr.index(), &table))
}

/// For each height `k` and symbol, the nodes of height exactly `k` at which
/// the symbol holds.
#[derive(Debug, Clone)]
pub struct EvalStrata {
    pub symbols: Vec<String>,
    /// `levels[k][i]`: nodes of height `k` satisfying symbol `i`.
    pub levels: Vec<Vec<Vec<NodeIx>>>,
}

pub fn strata(expr: &RecursiveJsl, t: &JsonTree) -> Result<EvalStrata, RecursiveError> {
    let order = require_well_formed(expr)?;
    let table = compute_table(expr, t, &order);
    let m = expr.definitions.len();
    let mut levels = vec![vec![Vec::new(); m]; t.height() + 1];
    for n in t.nodes() {
        for (d, values) in table.values.iter().enumerate() {
            if values.contains(n.index()) {
                levels[t.node_height(n)][d].push(n);
            }
        }
    }
    Ok(EvalStrata { symbols: expr.definitions.iter().map(|(n, _)| n.clone()).collect(), levels })
}

/// The expression accepting documents in which every root-to-leaf path
/// through object edges has even length.
pub fn even_path_expr() -> RecursiveJsl {
    parse_rjsl("let g1 = box(/.*/) g2; let g2 = dia(/.*/) true && box(/.*/) g1; in g1")
        .expect("fixed expression")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsl::{parse_jsl, validate};
    use crate::tree::parse_document;

    fn even_objects() -> RecursiveJsl {
        parse_rjsl("let g1 = box(/.*/) g2; let g2 = dia(/.*/) true && box(/.*/) g1; in g1").unwrap()
    }

    #[test]
    fn precedence() {
        let cyclic = parse_rjsl("let g1 = !g1; in g1").unwrap();
        let g = precedence_graph(&cyclic);
        assert_eq!(g.edges, vec![(0, 0)]);
        assert!(!is_well_formed(&cyclic));
        assert_eq!(g.find_cycle(), Some(vec!["g1".to_string(), "g1".to_string()]));
        let even = even_objects();
        assert!(precedence_graph(&even).edges.is_empty());
        assert!(is_well_formed(&even));
        let plain = parse_rjsl("int && box(/.*/) str").unwrap();
        assert!(plain.definitions.is_empty());
        assert!(is_well_formed(&plain));
        assert!(matches!(eval_recursive(&cyclic, &parse_document("1").unwrap()), Err(RecursiveError::IllFormed(_))));
    }

    #[test]
    fn unfold_even_path() {
        let got = unfold(&even_objects(), 4).unwrap();
        let want =
            parse_jsl("box(/.*/)( dia(/.*/)true && box(/.*/)box(/.*/)( dia(/.*/)true && box(/.*/)box(/.*/) false ) )")
                .unwrap();
        assert_eq!(got, want);
        let plain = RecursiveJsl::plain(parse_jsl("int").unwrap());
        assert_eq!(unfold(&plain, 3).unwrap(), parse_jsl("int").unwrap());
    }

    #[test]
    fn even_path_chains() {
        let e = even_objects();
        assert!(eval_recursive(&e, &parse_document(r#"{"a":{"b":1}}"#).unwrap()).unwrap());
        assert!(!eval_recursive(&e, &parse_document(r#"{"a":1}"#).unwrap()).unwrap());
        assert_eq!(even_path_expr(), e);
        assert!(eval_recursive(&e, &parse_document("1").unwrap()).unwrap());
        assert!(eval_recursive(&e, &parse_document(r#"{"a":{"b":1},"c":{"d":{"e":{"f":2}}}}"#).unwrap()).unwrap());
        assert!(!eval_recursive(&e, &parse_document(r#"{"a":{"b":1},"c":{"d":{"e":2}}}"#).unwrap()).unwrap());
    }

    #[test]
    fn complete_binary_tree() {
        let e = parse_rjsl(
            "let g = !dia(1) true || minCh(2) && maxCh(2) && !unique && box(1:2) g; in g",
        )
        .unwrap();
        assert!(eval_recursive(&e, &parse_document("[[],[]]").unwrap()).unwrap());
        assert!(!eval_recursive(&e, &parse_document("[[],[[],[]]]").unwrap()).unwrap());
    }

    #[test]
    fn matches_unfold() {
        let e = parse_rjsl("let a = dia(/.*/) b || int; let b = box(1:*) a && !str; in a && b").unwrap();
        for doc in ["1", "[1,2]", r#"{"x":[3]}"#, r#"{"x":["s"]}"#, r#"[{"y":[]}]"#] {
            let t = parse_document(doc).unwrap();
            assert_eq!(
                eval_recursive(&e, &t).unwrap(),
                validate(&t, &unfold(&e, t.height()).unwrap()),
                "{doc}"
            );
        }
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_rjsl("let g = h; in g"), Err(RecursiveError::UndefinedSymbol("h".into())));
        assert_eq!(parse_rjsl("let g = int; let g = str; in g"), Err(RecursiveError::DuplicateDefinition("g".into())));
        assert!(parse_rjsl("let g = int; g").is_err());
        assert!(parse_rjsl("let int = str; in int").is_err());
        let e = parse_rjsl("let g1 = box(/.*/) g2; let g2 = int; in g1").unwrap();
        assert_eq!(parse_rjsl(&e.to_string()).unwrap(), e);
    }
}
