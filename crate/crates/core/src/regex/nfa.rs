use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{parse_regex, CharSet, Regex, RegexError};

#[derive(Debug, Clone, Default)]
pub(crate) struct NfaState {
    pub eps: Vec<usize>,
    pub step: Option<(CharSet, usize)>,
}

/// Thompson automaton with one start and one accepting state.
#[derive(Debug, Clone)]
pub(crate) struct Nfa {
    pub states: Vec<NfaState>,
    pub start: usize,
    pub accept: usize,
}

impl Nfa {
    pub fn new(e: &Regex) -> Nfa {
        let mut states = Vec::new();
        let (start, accept) = build(e, &mut states);
        Nfa { states, start, accept }
    }

    fn fresh(states: &mut Vec<NfaState>) -> usize {
        states.push(NfaState::default());
        states.len() - 1
    }

    /// Adds the epsilon closure of `s` to `set`.
    pub fn close(&self, s: usize, set: &mut Vec<usize>, seen: &mut [bool]) {
        let mut stack = vec![s];
        while let Some(q) = stack.pop() {
            if std::mem::replace(&mut seen[q], true) {
                continue;
            }
            set.push(q);
            stack.extend(self.states[q].eps.iter().copied());
        }
    }

    pub fn matches(&self, w: &str) -> bool {
        let n = self.states.len();
        let mut seen = vec![false; n];
        let mut cur = Vec::new();
        self.close(self.start, &mut cur, &mut seen);
        for c in w.chars() {
            seen.iter_mut().for_each(|s| *s = false);
            let mut next = Vec::new();
            for &q in &cur {
                if let Some((set, t)) = &self.states[q].step {
                    if set.contains(c) {
                        self.close(*t, &mut next, &mut seen);
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        cur.contains(&self.accept)
    }
}

fn build(e: &Regex, st: &mut Vec<NfaState>) -> (usize, usize) {
    match e {
        Regex::Empty => (Nfa::fresh(st), Nfa::fresh(st)),
        Regex::Epsilon => {
            let s = Nfa::fresh(st);
            (s, s)
        }
        Regex::Char(_) | Regex::Any | Regex::Class(_) => {
            let set = match e {
                Regex::Char(c) => CharSet::single(*c),
                Regex::Any => CharSet::any(),
                Regex::Class(s) => s.clone(),
                _ => unreachable!(),
            };
            let s = Nfa::fresh(st);
            let t = Nfa::fresh(st);
            st[s].step = Some((set, t));
            (s, t)
        }
        Regex::Concat(a, b) => {
            let (s1, t1) = build(a, st);
            let (s2, t2) = build(b, st);
            st[t1].eps.push(s2);
            (s1, t2)
        }
        Regex::Union(a, b) => {
            let s = Nfa::fresh(st);
            let t = Nfa::fresh(st);
            let (s1, t1) = build(a, st);
            let (s2, t2) = build(b, st);
            st[s].eps.extend([s1, s2]);
            st[t1].eps.push(t);
            st[t2].eps.push(t);
            (s, t)
        }
        Regex::Star(a) => {
            let s = Nfa::fresh(st);
            let t = Nfa::fresh(st);
            let (s1, t1) = build(a, st);
            st[s].eps.extend([s1, t]);
            st[t1].eps.extend([s1, t]);
            (s, t)
        }
        Regex::Plus(a) => {
            let s = Nfa::fresh(st);
            let t = Nfa::fresh(st);
            let (s1, t1) = build(a, st);
            st[s].eps.push(s1);
            st[t1].eps.extend([s1, t]);
            (s, t)
        }
    }
}

/// A regex together with its compiled matcher. Equality, ordering and
/// hashing look at the syntax only.
#[derive(Clone)]
pub struct Pattern {
    regex: Regex,
    word: Option<String>,
    nfa: Arc<Nfa>,
}

impl Pattern {
    pub fn new(regex: Regex) -> Self {
        let word = regex.as_word();
        let nfa = Arc::new(Nfa::new(&regex));
        Pattern { regex, word, nfa }
    }

    pub fn parse(text: &str) -> Result<Self, RegexError> {
        parse_regex(text).map(Pattern::new)
    }

    /// Pattern matching exactly the word `w`.
    pub fn word(w: &str) -> Self {
        Pattern::new(Regex::word(w))
    }

    pub fn sigma_star() -> Self {
        Pattern::new(Regex::sigma_star())
    }

    pub fn regex(&self) -> &Regex {
        &self.regex
    }

    /// The single word this pattern matches, if its syntax is a plain word.
    pub fn as_word(&self) -> Option<&str> {
        self.word.as_deref()
    }

    pub fn matches(&self, w: &str) -> bool {
        match &self.word {
            Some(x) => x == w,
            None => self.nfa.matches(w),
        }
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.regex == other.regex
    }
}

impl Eq for Pattern {}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.regex.cmp(&other.regex)
    }
}

impl Hash for Pattern {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.regex.hash(state);
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}/", self.regex)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.regex)
    }
}
