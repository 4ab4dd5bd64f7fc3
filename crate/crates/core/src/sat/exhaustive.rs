use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::{checked, witness_key, Bounds, Inventory, SatError, SatInput, SatStrategy, SatVerdict};
use crate::recursive::is_well_formed;
use crate::tree::JsonValue;

/// Enumerates every tree within the bounds, smallest first, and evaluates
/// the formula on each. The budget counts candidate trees.
pub struct ExhaustiveStrategy;

/// Largest tree size considered, whatever the bounds say.
const MAX_NODES: usize = 4096;

struct Space<'a> {
    inv: &'a Inventory,
    width: usize,
    counts: HashMap<(usize, usize), f64>,
    trees: HashMap<(usize, usize), Rc<Vec<JsonValue>>>,
}

impl<'a> Space<'a> {
    fn leaves(&self) -> Vec<JsonValue> {
        let mut out = vec![JsonValue::Obj(BTreeMap::new()), JsonValue::Arr(Vec::new())];
        out.extend(self.inv.strings.iter().map(|s| JsonValue::Str(s.clone())));
        out.extend(self.inv.ints.iter().map(|&i| JsonValue::Int(i)));
        out
    }

    /// Number of trees with exactly `size` nodes and height at most `depth`.
    fn count(&mut self, size: usize, depth: usize) -> f64 {
        if size == 0 {
            return 0.0;
        }
        if size == 1 {
            return (2 + self.inv.strings.len() + self.inv.ints.len()) as f64;
        }
        if depth == 0 || self.width == 0 {
            return 0.0;
        }
        if let Some(&n) = self.counts.get(&(size, depth)) {
            return n;
        }
        let rest = size - 1;
        let sub: Vec<f64> = (0..=rest).map(|t| self.count(t, depth - 1)).collect();
        let w = self.width;
        // by[j][m]: j children with m nodes in total
        let mut objs = vec![vec![0.0; rest + 1]; w + 1];
        objs[0][0] = 1.0;
        for _ in &self.inv.keys {
            let prev = objs.clone();
            for j in 0..w {
                for m in 0..=rest {
                    if prev[j][m] == 0.0 {
                        continue;
                    }
                    for t in 1..=rest - m {
                        objs[j + 1][m + t] += prev[j][m] * sub[t];
                    }
                }
            }
        }
        let mut arrs = vec![vec![0.0; rest + 1]; w + 1];
        arrs[0][0] = 1.0;
        for j in 0..w {
            for m in 0..=rest {
                if arrs[j][m] == 0.0 {
                    continue;
                }
                for t in 1..=rest - m {
                    arrs[j + 1][m + t] += arrs[j][m] * sub[t];
                }
            }
        }
        let n: f64 = (1..=w).map(|j| objs[j][rest] + arrs[j][rest]).sum();
        self.counts.insert((size, depth), n);
        n
    }

    fn trees(&mut self, size: usize, depth: usize) -> Rc<Vec<JsonValue>> {
        if let Some(v) = self.trees.get(&(size, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out = self.leaves();
        } else if size > 1 && depth > 0 && self.width > 0 {
            let subs: Vec<Rc<Vec<JsonValue>>> = (0..size).map(|t| self.trees(t, depth - 1)).collect();
            let keys = self.inv.keys.clone();
            objects(&keys, 0, size - 1, self.width, &subs, &mut BTreeMap::new(), &mut out);
            arrays(size - 1, self.width, &subs, &mut Vec::new(), &mut out);
        }
        let out = Rc::new(out);
        self.trees.insert((size, depth), out.clone());
        out
    }
}

fn objects(
    keys: &[String],
    i: usize,
    rest: usize,
    room: usize,
    subs: &[Rc<Vec<JsonValue>>],
    acc: &mut BTreeMap<String, JsonValue>,
    out: &mut Vec<JsonValue>,
) {
    if rest == 0 {
        out.push(JsonValue::Obj(acc.clone()));
        return;
    }
    if i == keys.len() || room == 0 {
        return;
    }
    objects(keys, i + 1, rest, room, subs, acc, out);
    for t in 1..=rest {
        for child in subs[t].iter() {
            acc.insert(keys[i].clone(), child.clone());
            objects(keys, i + 1, rest - t, room - 1, subs, acc, out);
            acc.remove(&keys[i]);
        }
    }
}

fn arrays(rest: usize, room: usize, subs: &[Rc<Vec<JsonValue>>], acc: &mut Vec<JsonValue>, out: &mut Vec<JsonValue>) {
    if rest == 0 {
        if !acc.is_empty() {
            out.push(JsonValue::Arr(acc.clone()));
        }
        return;
    }
    if room == 0 {
        return;
    }
    for t in 1..=rest {
        for child in subs[t].iter() {
            acc.push(child.clone());
            arrays(rest - t, room - 1, subs, acc, out);
            acc.pop();
        }
    }
}

pub(crate) fn max_nodes(bounds: &Bounds) -> usize {
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..=bounds.max_depth {
        total = total.saturating_add(level);
        level = level.saturating_mul(bounds.max_width);
        if total >= MAX_NODES || level == 0 {
            break;
        }
    }
    total.min(MAX_NODES)
}

impl SatStrategy for ExhaustiveStrategy {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn solve(&self, input: &SatInput, bounds: &Bounds, budget: u64) -> Result<SatVerdict, SatError> {
        if let SatInput::Rjsl(e) = input {
            e.check_symbols()?;
            if !is_well_formed(e) {
                return Err(crate::recursive::RecursiveError::IllFormed(
                    crate::recursive::precedence_graph(e).find_cycle().unwrap_or_default(),
                )
                .into());
            }
        }
        let inv = Inventory::collect(input, bounds.max_atoms);
        let mut space = Space { inv: &inv, width: bounds.max_width, counts: HashMap::new(), trees: HashMap::new() };
        let largest = max_nodes(bounds);
        let total: f64 = (1..=largest).map(|s| space.count(s, bounds.max_depth)).sum();
        if total > budget as f64 {
            return Err(SatError::BoundsTooLarge { estimate: total.min(u64::MAX as f64) as u64, budget });
        }
        for size in 1..=largest {
            let layer = space.trees(size, bounds.max_depth);
            let mut candidates: Vec<_> = layer
                .iter()
                .map(|v| {
                    let t = v.to_tree();
                    (witness_key(v, &t), t)
                })
                .collect();
            candidates.sort_by(|a, b| a.0.cmp(&b.0));
            for (_, t) in candidates {
                if input.holds(&t)? {
                    return checked(input, t);
                }
            }
        }
        Ok(SatVerdict::UnsatUpToBound(*bounds))
    }
}
