use std::collections::{HashMap, VecDeque};

use super::nfa::Nfa;
use super::{CharSet, Regex, RegexError, MAX_CHAR};

pub const DEFAULT_STATE_CAP: usize = 10_000;

const SURROGATES: (u32, u32) = (0xD800, 0xDFFF);

/// Characters tried first when picking a representative for an alphabet
/// class, so that generated words stay readable.
const PREFERRED: &str = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.:@!#$%&'*+,;<=>?^`~|/()[]{}\\\" ";

/// A complete DFA over a partition of the alphabet into intervals of
/// characters that no source expression distinguishes.
#[derive(Debug, Clone)]
pub struct KeyDfa {
    atoms: Vec<(u32, u32)>,
    trans: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    start: usize,
}

fn partition(sets: &[CharSet]) -> Vec<(u32, u32)> {
    let mut bounds = vec![0, SURROGATES.0, SURROGATES.1 + 1, MAX_CHAR + 1];
    for s in sets {
        for &(lo, hi) in s.ranges() {
            bounds.push(lo);
            bounds.push(hi + 1);
        }
    }
    bounds.sort_unstable();
    bounds.dedup();
    bounds
        .windows(2)
        .map(|w| (w[0], w[1] - 1))
        .filter(|&a| a != SURROGATES)
        .collect()
}

fn representative(atom: (u32, u32)) -> char {
    PREFERRED
        .chars()
        .find(|&c| (atom.0..=atom.1).contains(&(c as u32)))
        .or_else(|| char::from_u32(atom.0))
        .expect("atoms exclude surrogates")
}

fn rep_rank(atom: (u32, u32)) -> (usize, u32) {
    let c = representative(atom);
    (PREFERRED.chars().position(|p| p == c).unwrap_or(usize::MAX), c as u32)
}

impl KeyDfa {
    /// Subset construction for the union of the given expressions.
    pub fn from_regexes(es: &[Regex], cap: usize) -> Result<KeyDfa, RegexError> {
        let mut sets = Vec::new();
        for e in es {
            e.charsets(&mut sets);
        }
        let atoms = partition(&sets);
        let reps: Vec<char> = atoms.iter().map(|a| char::from_u32(a.0).unwrap()).collect();

        // one combined automaton, several accepting states
        let mut nfa = Nfa { states: Vec::new(), start: 0, accept: 0 };
        let mut starts = Vec::new();
        let mut accepts = Vec::new();
        for e in es {
            let sub = Nfa::new(e);
            let off = nfa.states.len();
            for mut s in sub.states {
                s.eps.iter_mut().for_each(|q| *q += off);
                if let Some((_, t)) = &mut s.step {
                    *t += off;
                }
                nfa.states.push(s);
            }
            starts.push(sub.start + off);
            accepts.push(sub.accept + off);
        }
        let n = nfa.states.len();
        let mut is_accept = vec![false; n];
        accepts.iter().for_each(|&a| is_accept[a] = true);

        let mut seen = vec![false; n];
        let mut init = Vec::new();
        for &s in &starts {
            nfa.close(s, &mut init, &mut seen);
        }
        init.sort_unstable();

        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        let mut trans: Vec<Vec<usize>> = Vec::new();
        ids.insert(init.clone(), 0);
        subsets.push(init);
        let mut i = 0;
        while i < subsets.len() {
            let mut row = Vec::with_capacity(atoms.len());
            for &c in &reps {
                seen.iter_mut().for_each(|s| *s = false);
                let mut next = Vec::new();
                for &q in &subsets[i] {
                    if let Some((set, t)) = &nfa.states[q].step {
                        if set.contains(c) {
                            nfa.close(*t, &mut next, &mut seen);
                        }
                    }
                }
                next.sort_unstable();
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        if subsets.len() >= cap {
                            return Err(RegexError::StateBlowup(cap));
                        }
                        let id = subsets.len();
                        ids.insert(next.clone(), id);
                        subsets.push(next);
                        id
                    }
                };
                row.push(id);
            }
            trans.push(row);
            i += 1;
        }
        let accepting = subsets.iter().map(|s| s.iter().any(|&q| is_accept[q])).collect();
        Ok(KeyDfa { atoms, trans, accepting, start: 0 })
    }

    pub fn from_regex(e: &Regex) -> Result<KeyDfa, RegexError> {
        KeyDfa::from_regexes(std::slice::from_ref(e), DEFAULT_STATE_CAP)
    }

    pub fn complement(mut self) -> KeyDfa {
        self.accepting.iter_mut().for_each(|a| *a = !*a);
        self
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    fn atom_of(&self, c: char) -> usize {
        let c = c as u32;
        self.atoms
            .binary_search_by(|&(lo, hi)| {
                if hi < c {
                    std::cmp::Ordering::Less
                } else if lo > c {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .expect("partition covers every scalar value")
    }

    pub fn accepts(&self, w: &str) -> bool {
        let mut s = self.start;
        for c in w.chars() {
            s = self.trans[s][self.atom_of(c)];
        }
        self.accepting[s]
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.trans.len()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(s) = queue.pop_front() {
            for &t in &self.trans[s] {
                if !std::mem::replace(&mut seen[t], true) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// States from which some accepting state is reachable.
    fn live(&self) -> Vec<bool> {
        let n = self.trans.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, row) in self.trans.iter().enumerate() {
            for &t in row {
                rev[t].push(s);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&s| live[s]).collect();
        while let Some(t) = stack.pop() {
            for &s in &rev[t] {
                if !std::mem::replace(&mut live[s], true) {
                    stack.push(s);
                }
            }
        }
        live
    }

    pub fn is_empty(&self) -> bool {
        let reach = self.reachable();
        !(0..self.trans.len()).any(|s| reach[s] && self.accepting[s])
    }

    /// Distinct accepted words, shortest first, one representative
    /// character per alphabet class.
    pub fn enumerate_words(&self, max_len: usize, max_count: usize) -> Vec<String> {
        let live = self.live();
        let mut out = Vec::new();
        if max_count == 0 || !live[self.start] {
            return out;
        }
        let mut order: Vec<usize> = (0..self.atoms.len()).collect();
        order.sort_by_key(|&a| rep_rank(self.atoms[a]));
        let frontier_cap = (max_count * 16).max(4096);
        let mut frontier = vec![(String::new(), self.start)];
        for len in 0..=max_len {
            for (w, s) in &frontier {
                if self.accepting[*s] {
                    out.push(w.clone());
                    if out.len() == max_count {
                        return out;
                    }
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            'grow: for (w, s) in &frontier {
                for &a in &order {
                    let t = self.trans[*s][a];
                    if live[t] {
                        let mut w2 = w.clone();
                        w2.push(representative(self.atoms[a]));
                        next.push((w2, t));
                        if next.len() >= frontier_cap {
                            break 'grow;
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out
    }

    /// Equivalent DFA with the fewest states (unreachable states dropped).
    pub fn minimize(&self) -> KeyDfa {
        let reach = self.reachable();
        let states: Vec<usize> = (0..self.trans.len()).filter(|&s| reach[s]).collect();
        let mut class: Vec<usize> = vec![usize::MAX; self.trans.len()];
        for &s in &states {
            class[s] = usize::from(self.accepting[s]);
        }
        let mut count = 0;
        loop {
            let mut sig: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![usize::MAX; self.trans.len()];
            for &s in &states {
                let key = (class[s], self.trans[s].iter().map(|&t| class[t]).collect());
                let len = sig.len();
                next[s] = *sig.entry(key).or_insert(len);
            }
            let new_count = sig.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut trans = vec![Vec::new(); count];
        let mut accepting = vec![false; count];
        for &s in &states {
            let c = class[s];
            if trans[c].is_empty() {
                trans[c] = self.trans[s].iter().map(|&t| class[t]).collect();
                accepting[c] = self.accepting[s];
            }
        }
        KeyDfa { atoms: self.atoms.clone(), trans, accepting, start: class[self.start] }
    }

    /// A regular expression for the accepted language, by state
    /// elimination over the minimized automaton.
    pub fn to_regex(&self) -> Regex {
        let d = self.minimize();
        let live = d.live();
        let n = d.trans.len();
        if !live[d.start] {
            return Regex::Empty;
        }
        // nodes 0..n are DFA states, n is the new start, n+1 the new final
        let (s0, f0) = (n, n + 1);
        let mut edges: Vec<HashMap<usize, Regex>> = vec![HashMap::new(); n + 2];
        for s in (0..n).filter(|&s| live[s]) {
            let mut by_target: HashMap<usize, Vec<(u32, u32)>> = HashMap::new();
            for (a, &t) in d.trans[s].iter().enumerate() {
                if live[t] {
                    by_target.entry(t).or_default().push(d.atoms[a]);
                }
            }
            for (t, ranges) in by_target {
                edges[s].insert(t, Regex::from_charset(CharSet::from_ranges(ranges)));
            }
            if d.accepting[s] {
                edges[s].insert(f0, Regex::Epsilon);
            }
        }
        edges[s0].insert(d.start, Regex::Epsilon);

        let mut remaining: Vec<usize> = (0..n).filter(|&s| live[s]).collect();
        while !remaining.is_empty() {
            // eliminate the state with the fewest in*out paths
            let cost = |k: usize, edges: &Vec<HashMap<usize, Regex>>| {
                let ins = edges.iter().enumerate().filter(|(i, e)| *i != k && e.contains_key(&k)).count();
                let outs = edges[k].keys().filter(|&&j| j != k).count();
                ins * outs
            };
            let (pos, &k) = remaining
                .iter()
                .enumerate()
                .min_by_key(|(_, &k)| (cost(k, &edges), k))
                .unwrap();
            remaining.swap_remove(pos);
            let looped = edges[k].remove(&k).map(Regex::star).unwrap_or(Regex::Epsilon);
            let outs: Vec<(usize, Regex)> = edges[k].drain().collect();
            for i in 0..n + 2 {
                let Some(into) = edges[i].remove(&k) else { continue };
                for (j, out) in &outs {
                    let path = Regex::concat(into.clone(), Regex::concat(looped.clone(), out.clone()));
                    let merged = match edges[i].remove(j) {
                        Some(old) => Regex::union(old, path),
                        None => path,
                    };
                    edges[i].insert(*j, merged);
                }
            }
        }
        edges[s0].remove(&f0).unwrap_or(Regex::Empty)
    }
}

/// DFA for the words matched by none of `es`.
pub fn complement_intersection(es: &[Regex]) -> Result<KeyDfa, RegexError> {
    complement_intersection_with_cap(es, DEFAULT_STATE_CAP)
}

pub fn complement_intersection_with_cap(es: &[Regex], cap: usize) -> Result<KeyDfa, RegexError> {
    Ok(KeyDfa::from_regexes(es, cap)?.complement())
}

pub fn is_empty(d: &KeyDfa) -> bool {
    d.is_empty()
}
