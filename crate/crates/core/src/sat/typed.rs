use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use super::inventory::constant_subtrees;
use super::{checked, Bounds, Inventory, SatError, SatInput, SatStrategy, SatVerdict};
use crate::automaton::{jnl_to_automaton, jsl_to_automaton, recursive_to_automaton, Axis, JAutomaton, Quant, Rule, TreeRule};
use crate::jsl::NodeView;
use crate::tree::{Atom, JsonTree, JsonValue, NodeKind};

/// Searches for a tree accepted by the formula's automaton. Instead of
/// trees it enumerates types: the set of states a node gets, together with
/// which constant subtrees the node equals. Types of depth `k + 1` are
/// assembled from types of depth `k` by a pass over the keys (or
/// positions) that only remembers what the tree rules can observe. The
/// budget counts assembly steps.
pub struct AutomatonStrategy;

impl SatStrategy for AutomatonStrategy {
    fn name(&self) -> &'static str {
        "automaton"
    }

    fn solve(&self, input: &SatInput, bounds: &Bounds, budget: u64) -> Result<SatVerdict, SatError> {
        let a = match input {
            SatInput::Jsl(phi) => jsl_to_automaton(phi),
            SatInput::Rjsl(e) => recursive_to_automaton(e)?,
            SatInput::Jnl(phi) => jnl_to_automaton(phi)
                .map_err(|e| SatError::Unsupported { strategy: self.name().into(), reason: e.to_string() })?,
        };
        let inv = Inventory::collect(input, bounds.max_atoms);
        let mut s = Search::new(&a, &inv, constant_subtrees(input), bounds, budget, input.uses_unique());
        match s.run()? {
            Some(t) => checked(input, t),
            None => Ok(SatVerdict::UnsatUpToBound(*bounds)),
        }
    }
}

/// Tree rules with quantified atoms replaced by atom indices.
enum IRule {
    True,
    False,
    Atom(usize),
    And(Vec<IRule>),
    Or(Vec<IRule>),
}

impl IRule {
    fn eval(&self, bits: &FixedBitSet) -> bool {
        match self {
            IRule::True => true,
            IRule::False => false,
            IRule::Atom(i) => bits.contains(*i),
            IRule::And(rs) => rs.iter().all(|r| r.eval(bits)),
            IRule::Or(rs) => rs.iter().any(|r| r.eval(bits)),
        }
    }
}

struct Consts {
    trees: Vec<JsonTree>,
    index: HashMap<String, usize>,
    /// Object constants: key to the constant index of the child.
    objs: Vec<(usize, BTreeMap<String, usize>)>,
    arrs: Vec<(usize, Vec<usize>)>,
}

impl Consts {
    fn new(trees: Vec<JsonTree>) -> Consts {
        let index: HashMap<String, usize> =
            trees.iter().enumerate().map(|(i, t)| (t.canonical().to_string(), i)).collect();
        let mut objs = Vec::new();
        let mut arrs = Vec::new();
        for (i, t) in trees.iter().enumerate() {
            let root = t.root();
            let child = |c| index[&crate::tree::serialize(t, c)];
            match t.kind(root) {
                NodeKind::Obj => objs.push((
                    i,
                    t.children(root).iter().map(|&c| (t.key(c).unwrap().to_string(), child(c))).collect(),
                )),
                NodeKind::Arr => arrs.push((i, t.children(root).iter().map(|&c| child(c)).collect())),
                _ => {}
            }
        }
        Consts { trees, index, objs, arrs }
    }
}

struct Synth<'a> {
    kind: NodeKind,
    atom: Option<&'a Atom>,
    count: usize,
    distinct: bool,
    bits: &'a FixedBitSet,
    consts: &'a Consts,
    offset: usize,
}

impl NodeView for Synth<'_> {
    fn kind(&self) -> NodeKind {
        self.kind
    }

    fn atom(&self) -> Option<&Atom> {
        self.atom
    }

    fn child_count(&self) -> usize {
        self.count
    }

    fn children_distinct(&self) -> bool {
        self.distinct
    }

    fn equals(&self, constant: &JsonTree) -> bool {
        self.consts.index.get(constant.canonical()).is_some_and(|&i| self.bits.contains(self.offset + i))
    }
}

#[derive(Clone)]
struct Rep {
    value: Rc<JsonValue>,
    /// Witness order: nodes, kind rank, canonical text.
    key: (usize, u8, String),
}

#[derive(Clone)]
struct TypeEntry {
    bits: FixedBitSet,
    reps: Vec<Rep>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct DpKey {
    count: usize,
    atoms: FixedBitSet,
    /// Per object or array constant: still possibly equal.
    eq: FixedBitSet,
    /// Chosen (type, representative) pairs, sorted; only tracked when
    /// distinctness of array children matters.
    chosen: Vec<(u32, u32)>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Partial {
    size: usize,
    children: Vec<(u32, u32, u32)>,
}

struct Search<'a> {
    a: &'a JAutomaton,
    order: Vec<usize>,
    tree_rules: Vec<(usize, IRule)>,
    atom_init: FixedBitSet,
    atom_quant: Vec<Quant>,
    /// Atoms observing each inventory key, and each array position.
    key_atoms: Vec<Vec<(usize, usize)>>,
    pos_atoms: Vec<Vec<(usize, usize)>>,
    consts: Consts,
    inv: &'a Inventory,
    bounds: Bounds,
    budget: u64,
    work: u64,
    unique: bool,
    per_type: usize,
    types: Vec<TypeEntry>,
    by_bits: HashMap<FixedBitSet, usize>,
    /// Atom indices used by each tree state's rule.
    tree_atoms: Vec<Vec<usize>>,
    atom_state: Vec<usize>,
    /// States (and constant bits) that matter at the current depth, and
    /// the atoms their tree rules read.
    mask: FixedBitSet,
    atom_mask: FixedBitSet,
}

impl<'a> Search<'a> {
    fn new(
        a: &'a JAutomaton,
        inv: &'a Inventory,
        consts: Vec<JsonTree>,
        bounds: &Bounds,
        budget: u64,
        unique: bool,
    ) -> Search<'a> {
        let atoms = a.quant_atoms();
        let index_of = |quant: Quant, axis: &Axis, q: usize| {
            atoms.iter().position(|(a, b, c)| *a == quant && b == axis && *c == q).unwrap()
        };
        fn collect_atoms(r: &TreeRule, index_of: &dyn Fn(Quant, &Axis, usize) -> usize, out: &mut Vec<usize>) {
            match r {
                TreeRule::Atom(quant, axis, q) => out.push(index_of(*quant, axis, *q)),
                TreeRule::And(rs) | TreeRule::Or(rs) => rs.iter().for_each(|r| collect_atoms(r, index_of, out)),
                _ => {}
            }
        }
        fn convert(r: &TreeRule, index_of: &dyn Fn(Quant, &Axis, usize) -> usize) -> IRule {
            match r {
                TreeRule::True => IRule::True,
                TreeRule::False => IRule::False,
                TreeRule::Atom(quant, axis, q) => IRule::Atom(index_of(*quant, axis, *q)),
                TreeRule::And(rs) => IRule::And(rs.iter().map(|r| convert(r, index_of)).collect()),
                TreeRule::Or(rs) => IRule::Or(rs.iter().map(|r| convert(r, index_of)).collect()),
            }
        }
        let tree_rules = a
            .rules()
            .iter()
            .enumerate()
            .filter_map(|(q, r)| match r {
                Rule::Tree(r) => Some((q, convert(r, &index_of))),
                Rule::Node(_) => None,
            })
            .collect();
        let mut atom_init = FixedBitSet::with_capacity(atoms.len());
        for (i, (quant, _, _)) in atoms.iter().enumerate() {
            if *quant == Quant::Forall {
                atom_init.insert(i);
            }
        }
        let key_atoms = inv
            .keys
            .iter()
            .map(|k| {
                let label = crate::tree::EdgeLabel::Key(k.clone());
                atoms.iter().enumerate().filter(|(_, (_, ax, _))| ax.matches(&label)).map(|(i, (_, _, q))| (i, *q)).collect()
            })
            .collect();
        let pos_atoms = (0..=bounds.max_width)
            .map(|p| {
                let label = crate::tree::EdgeLabel::Index(p);
                atoms.iter().enumerate().filter(|(_, (_, ax, _))| ax.matches(&label)).map(|(i, (_, _, q))| (i, *q)).collect()
            })
            .collect();
        let mut tree_atoms = vec![Vec::new(); a.state_count()];
        for (q, r) in a.rules().iter().enumerate() {
            if let Rule::Tree(r) = r {
                let mut used = Vec::new();
                collect_atoms(r, &index_of, &mut used);
                tree_atoms[q] = used;
            }
        }
        Search {
            tree_atoms,
            atom_state: atoms.iter().map(|(_, _, q)| *q).collect(),
            mask: FixedBitSet::new(),
            atom_mask: FixedBitSet::new(),
            a,
            order: a.node_order().expect("constructed automata have acyclic node rules"),
            tree_rules,
            atom_init,
            atom_quant: atoms.iter().map(|(quant, _, _)| *quant).collect(),
            key_atoms,
            pos_atoms,
            consts: Consts::new(consts),
            inv,
            bounds: *bounds,
            budget,
            work: 0,
            unique,
            per_type: if unique { bounds.max_width.max(1) } else { 1 },
            types: Vec::new(),
            by_bits: HashMap::new(),
        }
    }

    fn nstates(&self) -> usize {
        self.a.state_count()
    }

    /// The full type of a node given its kind, atom, child count, the
    /// constants it equals and the values of the quantified atoms.
    fn classify(&self, kind: NodeKind, atom: Option<&Atom>, count: usize, distinct: bool, equal: &[usize], atoms: &FixedBitSet) -> FixedBitSet {
        let n = self.nstates();
        let mut bits = FixedBitSet::with_capacity(n + self.consts.trees.len());
        for &c in equal {
            bits.insert(n + c);
        }
        for (q, r) in &self.tree_rules {
            if self.mask.contains(*q) && r.eval(atoms) {
                bits.insert(*q);
            }
        }
        let mut set = Vec::new();
        {
            let view = Synth { kind, atom, count, distinct, bits: &bits, consts: &self.consts, offset: n };
            let mut cur = bits.clone();
            for &q in &self.order {
                if !self.mask.contains(q) {
                    continue;
                }
                if let Rule::Node(r) = &self.a.rules()[q] {
                    if r.eval(&view, &cur) {
                        cur.insert(q);
                        set.push(q);
                    }
                }
            }
        }
        for q in set {
            bits.insert(q);
        }
        bits
    }

    fn add_rep(&mut self, bits: FixedBitSet, value: JsonValue) -> bool {
        let tree = value.to_tree();
        let rep = Rep { key: super::witness_key(&value, &tree), value: Rc::new(value) };
        match self.by_bits.get(&bits) {
            None => {
                self.by_bits.insert(bits.clone(), self.types.len());
                self.types.push(TypeEntry { bits, reps: vec![rep] });
                true
            }
            Some(&i) => {
                let reps = &mut self.types[i].reps;
                if reps.iter().any(|r| r.key == rep.key) {
                    return false;
                }
                let at = reps.partition_point(|r| r.key < rep.key);
                if at >= self.per_type {
                    return false;
                }
                reps.insert(at, rep);
                reps.truncate(self.per_type);
                true
            }
        }
    }

    fn leaves(&mut self) {
        let mut values = vec![JsonValue::Obj(BTreeMap::new()), JsonValue::Arr(Vec::new())];
        values.extend(self.inv.strings.iter().map(|s| JsonValue::Str(s.clone())));
        values.extend(self.inv.ints.iter().map(|&i| JsonValue::Int(i)));
        for v in values {
            let t = v.to_tree();
            let equal: Vec<usize> = (0..self.consts.trees.len())
                .filter(|&i| crate::tree::subtree_eq(&t, t.root(), &self.consts.trees[i], self.consts.trees[i].root()))
                .collect();
            let atom = t.atom(t.root()).cloned();
            let bits = self.classify(v.kind(), atom.as_ref(), 0, true, &equal, &self.atom_init.clone());
            self.add_rep(bits, v);
        }
    }

    fn spend(&mut self, n: u64) -> Result<(), SatError> {
        self.work += n;
        if self.work > self.budget {
            Err(SatError::BoundsTooLarge { estimate: self.work, budget: self.budget })
        } else {
            Ok(())
        }
    }

    fn insert(&self, map: &mut HashMap<DpKey, Vec<Partial>>, key: DpKey, p: Partial) {
        let list = map.entry(key).or_default();
        if list.contains(&p) {
            return;
        }
        let at = list.partition_point(|x| x < &p);
        if at < self.per_type {
            list.insert(at, p);
            list.truncate(self.per_type);
        }
    }

    fn step_atoms(&self, atoms: &FixedBitSet, observers: &[(usize, usize)], child: &FixedBitSet) -> FixedBitSet {
        let mut out = atoms.clone();
        for &(i, q) in observers {
            let has = child.contains(q);
            match self.atom_quant[i] {
                Quant::Exists => {
                    if has {
                        out.insert(i);
                    }
                }
                Quant::Forall => {
                    if !has {
                        out.set(i, false);
                    }
                }
            }
        }
        out
    }

    fn start(&self, nconsts: usize) -> DpKey {
        let mut eq = FixedBitSet::with_capacity(nconsts);
        eq.insert_range(..);
        DpKey { count: 0, atoms: self.atom_init.clone(), eq, chosen: Vec::new() }
    }

    /// Options for the next child: type, representative, and size. Types
    /// that agree on the observed states and constants are interchangeable,
    /// so only the smallest representatives of each such class are offered.
    fn options(&self, snapshot: &[TypeEntry], observers: &[(usize, usize)], consts: &[Option<usize>]) -> Vec<(u32, u32, usize)> {
        let n = self.nstates();
        let mut watched: Vec<usize> = observers.iter().map(|&(_, q)| q).collect();
        watched.extend(consts.iter().flatten().map(|&c| n + c));
        watched.sort_unstable();
        watched.dedup();
        let mut classes: HashMap<Vec<bool>, Vec<(&Rep, u32, u32)>> = HashMap::new();
        for (t, e) in snapshot.iter().enumerate() {
            let proj: Vec<bool> = watched.iter().map(|&q| e.bits.contains(q)).collect();
            let class = classes.entry(proj).or_default();
            for (r, rep) in e.reps.iter().enumerate() {
                class.push((rep, t as u32, r as u32));
            }
        }
        let mut out = Vec::new();
        for mut class in classes.into_values() {
            class.sort_by(|a, b| a.0.key.cmp(&b.0.key));
            out.extend(class.into_iter().take(self.per_type).map(|(rep, t, r)| (t, r, rep.key.0)));
        }
        out.sort_unstable();
        out
    }

    fn objects(&mut self, snapshot: &[TypeEntry]) -> Result<Vec<(FixedBitSet, JsonValue)>, SatError> {
        let n = self.nstates();
        let w = self.bounds.max_width;
        let mut map: HashMap<DpKey, Vec<Partial>> = HashMap::new();
        map.insert(self.start(self.consts.objs.len()), vec![Partial { size: 1, children: Vec::new() }]);
        for (ki, key) in self.inv.keys.iter().enumerate() {
            let mut next = map.clone();
            let expected: Vec<Option<usize>> = self.consts.objs.iter().map(|(_, m)| m.get(key).copied()).collect();
            let observers: Vec<(usize, usize)> =
                self.key_atoms[ki].iter().copied().filter(|&(i, _)| self.atom_mask.contains(i)).collect();
            let options = self.options(snapshot, &observers, &expected);
            for (dk, partials) in &map {
                if dk.count >= w {
                    continue;
                }
                self.spend(options.len() as u64)?;
                for &(t, r, size) in &options {
                    let bits = &snapshot[t as usize].bits;
                    let mut eq = dk.eq.clone();
                    for (j, exp) in expected.iter().enumerate() {
                        if eq.contains(j) && !exp.is_some_and(|c| bits.contains(n + c)) {
                            eq.set(j, false);
                        }
                    }
                    let nk = DpKey {
                        count: dk.count + 1,
                        atoms: self.step_atoms(&dk.atoms, &observers, bits),
                        eq,
                        chosen: Vec::new(),
                    };
                    for p in partials {
                        let mut children = p.children.clone();
                        children.push((ki as u32, t, r));
                        self.insert(&mut next, nk.clone(), Partial { size: p.size + size, children });
                    }
                }
            }
            map = next;
        }
        let mut out = Vec::new();
        for (dk, partials) in map {
            if dk.count == 0 {
                continue;
            }
            let equal: Vec<usize> = self
                .consts
                .objs
                .iter()
                .enumerate()
                .filter(|(j, (_, m))| dk.eq.contains(*j) && m.len() == dk.count)
                .map(|(_, (c, _))| *c)
                .collect();
            let bits = self.classify(NodeKind::Obj, None, dk.count, true, &equal, &dk.atoms);
            for p in partials {
                let members = p
                    .children
                    .iter()
                    .map(|&(k, t, r)| (self.inv.keys[k as usize].clone(), (*snapshot[t as usize].reps[r as usize].value).clone()))
                    .collect();
                out.push((bits.clone(), JsonValue::Obj(members)));
            }
        }
        Ok(out)
    }

    fn arrays(&mut self, snapshot: &[TypeEntry]) -> Result<Vec<(FixedBitSet, JsonValue)>, SatError> {
        let n = self.nstates();
        let w = self.bounds.max_width;
        let mut layer: HashMap<DpKey, Vec<Partial>> = HashMap::new();
        layer.insert(self.start(self.consts.arrs.len()), vec![Partial { size: 1, children: Vec::new() }]);
        let mut finished = Vec::new();
        for pos in 1..=w {
            let expected: Vec<Option<usize>> = self.consts.arrs.iter().map(|(_, items)| items.get(pos - 1).copied()).collect();
            let observers: Vec<(usize, usize)> =
                self.pos_atoms[pos].iter().copied().filter(|&(i, _)| self.atom_mask.contains(i)).collect();
            let options = self.options(snapshot, &observers, &expected);
            let mut next: HashMap<DpKey, Vec<Partial>> = HashMap::new();
            for (dk, partials) in &layer {
                self.spend(options.len() as u64)?;
                for &(t, r, size) in &options {
                    let bits = &snapshot[t as usize].bits;
                    let mut eq = dk.eq.clone();
                    for (j, exp) in expected.iter().enumerate() {
                        if eq.contains(j) && !exp.is_some_and(|c| bits.contains(n + c)) {
                            eq.set(j, false);
                        }
                    }
                    let mut chosen = dk.chosen.clone();
                    if self.unique {
                        let at = chosen.partition_point(|x| *x < (t, r));
                        chosen.insert(at, (t, r));
                    }
                    let nk = DpKey {
                        count: pos,
                        atoms: self.step_atoms(&dk.atoms, &observers, bits),
                        eq,
                        chosen,
                    };
                    for p in partials {
                        let mut children = p.children.clone();
                        children.push((pos as u32, t, r));
                        self.insert(&mut next, nk.clone(), Partial { size: p.size + size, children });
                    }
                }
            }
            finished.extend(next.iter().map(|(k, v)| (k.clone(), v.clone())));
            layer = next;
        }
        let mut out = Vec::new();
        for (dk, partials) in finished {
            let equal: Vec<usize> = self
                .consts
                .arrs
                .iter()
                .enumerate()
                .filter(|(j, (_, items))| dk.eq.contains(*j) && items.len() == dk.count)
                .map(|(_, (c, _))| *c)
                .collect();
            let distinct = dk.chosen.windows(2).all(|p| p[0] != p[1]);
            let bits = self.classify(NodeKind::Arr, None, dk.count, distinct, &equal, &dk.atoms);
            for p in partials {
                let items = p
                    .children
                    .iter()
                    .map(|&(_, t, r)| (*snapshot[t as usize].reps[r as usize].value).clone())
                    .collect();
                out.push((bits.clone(), JsonValue::Arr(items)));
            }
        }
        Ok(out)
    }

    /// Closes a set of states under the node rules' dependencies.
    fn close(&self, mut set: FixedBitSet) -> FixedBitSet {
        let mut stack: Vec<usize> = set.ones().collect();
        while let Some(q) = stack.pop() {
            if let Rule::Node(r) = &self.a.rules()[q] {
                let mut used = Vec::new();
                r.states(&mut used);
                for p in used {
                    if !set.put(p) {
                        stack.push(p);
                    }
                }
            }
        }
        set
    }

    /// For each depth, the states a node there may need and the atoms read
    /// by those states.
    fn relevance(&self) -> Vec<(FixedBitSet, FixedBitSet)> {
        let n = self.nstates();
        let total = n + self.consts.trees.len();
        let mut start = FixedBitSet::with_capacity(total);
        for &f in self.a.finals() {
            start.insert(f);
        }
        let mut out = Vec::new();
        let mut states = self.close(start);
        for _ in 0..=self.bounds.max_depth {
            let mut atoms = FixedBitSet::with_capacity(self.atom_state.len());
            let mut below = FixedBitSet::with_capacity(total);
            for q in states.ones().filter(|&q| q < n) {
                for &i in &self.tree_atoms[q] {
                    atoms.insert(i);
                    below.insert(self.atom_state[i]);
                }
            }
            let mut mask = states.clone();
            mask.insert_range(n..total);
            out.push((mask, atoms));
            states = self.close(below);
        }
        out
    }

    fn run(&mut self) -> Result<Option<JsonTree>, SatError> {
        let levels = self.relevance();
        let mut below: Vec<TypeEntry> = Vec::new();
        for depth in (0..=self.bounds.max_depth).rev() {
            self.types.clear();
            self.by_bits.clear();
            self.mask = levels[depth].0.clone();
            self.atom_mask = levels[depth].1.clone();
            self.leaves();
            if depth < self.bounds.max_depth && self.bounds.max_width > 0 {
                let mut found = self.objects(&below)?;
                found.extend(self.arrays(&below)?);
                for (bits, v) in found {
                    self.add_rep(bits, v);
                }
            }
            below = std::mem::take(&mut self.types);
        }
        let best = below
            .iter()
            .filter(|e| self.a.accepts_states(&e.bits))
            .map(|e| &e.reps[0])
            .min_by(|x, y| x.key.cmp(&y.key));
        Ok(best.map(|r| r.value.to_tree()))
    }
}
