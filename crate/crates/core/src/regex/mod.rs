//! Regular expressions over Unicode scalar values, used as key and string
//! patterns. Matching is always anchored: a pattern matches a word only if
//! it matches the whole word.

mod dfa;
mod nfa;

use std::fmt;

use thiserror::Error;

pub use dfa::{complement_intersection, complement_intersection_with_cap, is_empty, KeyDfa, DEFAULT_STATE_CAP};
pub use nfa::Pattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegexError {
    #[error("malformed regex at offset {offset}: {msg}")]
    MalformedRegex { offset: usize, msg: String },
    #[error("automaton exceeded the state cap of {0}")]
    StateBlowup(usize),
}

const MAX_CHAR: u32 = 0x10FFFF;

/// A set of characters as sorted, disjoint, non-adjacent closed intervals of
/// code points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharSet {
    ranges: Vec<(u32, u32)>,
}

impl CharSet {
    pub fn empty() -> Self {
        CharSet { ranges: Vec::new() }
    }

    pub fn any() -> Self {
        CharSet { ranges: vec![(0, MAX_CHAR)] }
    }

    pub fn single(c: char) -> Self {
        CharSet { ranges: vec![(c as u32, c as u32)] }
    }

    pub fn from_ranges(mut ranges: Vec<(u32, u32)>) -> Self {
        ranges.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(ranges.len());
        for (lo, hi) in ranges {
            if lo > hi {
                continue;
            }
            match out.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        CharSet { ranges: out }
    }

    pub fn ranges(&self) -> &[(u32, u32)] {
        &self.ranges
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn is_any(&self) -> bool {
        self.ranges == [(0, MAX_CHAR)]
    }

    pub fn as_single(&self) -> Option<char> {
        match self.ranges.as_slice() {
            [(lo, hi)] if lo == hi => char::from_u32(*lo),
            _ => None,
        }
    }

    pub fn contains(&self, c: char) -> bool {
        let c = c as u32;
        self.ranges
            .binary_search_by(|&(lo, hi)| {
                if hi < c {
                    std::cmp::Ordering::Less
                } else if lo > c {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn union(&self, other: &CharSet) -> CharSet {
        let mut r = self.ranges.clone();
        r.extend_from_slice(&other.ranges);
        CharSet::from_ranges(r)
    }

    pub fn complement(&self) -> CharSet {
        let mut out = Vec::new();
        let mut next = 0u32;
        for &(lo, hi) in &self.ranges {
            if lo > next {
                out.push((next, lo - 1));
            }
            next = hi + 1;
        }
        if next <= MAX_CHAR {
            out.push((next, MAX_CHAR));
        }
        CharSet { ranges: out }
    }
}

/// Regular expression syntax. `Plus`, `Class` and `Any` are sugar kept in
/// the tree so that printing preserves the user's shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    Empty,
    Epsilon,
    Char(char),
    Any,
    Class(CharSet),
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
}

impl Regex {
    pub fn sigma_star() -> Regex {
        Regex::Star(Box::new(Regex::Any))
    }

    /// The regex matching exactly `w`.
    pub fn word(w: &str) -> Regex {
        let mut chars = w.chars().rev();
        match chars.next() {
            None => Regex::Epsilon,
            Some(last) => chars.fold(Regex::Char(last), |acc, c| {
                Regex::Concat(Box::new(Regex::Char(c)), Box::new(acc))
            }),
        }
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
            (Regex::Epsilon, x) | (x, Regex::Epsilon) => x,
            (Regex::Concat(x, y), b) => Regex::Concat(x, Box::new(Regex::concat(*y, b))),
            (a, b) => Regex::Concat(Box::new(a), Box::new(b)),
        }
    }

    pub fn union(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, x) | (x, Regex::Empty) => x,
            (a, b) if a == b => a,
            (a, b) => match (a.as_charset(), b.as_charset()) {
                (Some(x), Some(y)) => Regex::from_charset(x.union(&y)),
                _ => Regex::Union(Box::new(a), Box::new(b)),
            },
        }
    }

    pub fn star(a: Regex) -> Regex {
        match a {
            Regex::Empty | Regex::Epsilon => Regex::Epsilon,
            s @ Regex::Star(_) => s,
            Regex::Plus(x) => Regex::Star(x),
            a => Regex::Star(Box::new(a)),
        }
    }

    pub fn from_charset(set: CharSet) -> Regex {
        if set.is_empty() {
            Regex::Empty
        } else if set.is_any() {
            Regex::Any
        } else if let Some(c) = set.as_single() {
            Regex::Char(c)
        } else {
            Regex::Class(set)
        }
    }

    fn as_charset(&self) -> Option<CharSet> {
        match self {
            Regex::Char(c) => Some(CharSet::single(*c)),
            Regex::Any => Some(CharSet::any()),
            Regex::Class(s) => Some(s.clone()),
            _ => None,
        }
    }

    /// If the language is a single word, that word.
    pub fn as_word(&self) -> Option<String> {
        match self {
            Regex::Epsilon => Some(String::new()),
            Regex::Char(c) => Some(c.to_string()),
            Regex::Class(s) => s.as_single().map(|c| c.to_string()),
            Regex::Concat(a, b) => Some(a.as_word()? + &b.as_word()?),
            _ => None,
        }
    }

    /// Every character set occurring in the expression.
    pub(crate) fn charsets(&self, out: &mut Vec<CharSet>) {
        match self {
            Regex::Empty | Regex::Epsilon => {}
            Regex::Char(c) => out.push(CharSet::single(*c)),
            Regex::Any => out.push(CharSet::any()),
            Regex::Class(s) => out.push(s.clone()),
            Regex::Concat(a, b) | Regex::Union(a, b) => {
                a.charsets(out);
                b.charsets(out);
            }
            Regex::Star(a) | Regex::Plus(a) => a.charsets(out),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Regex::Concat(a, b) | Regex::Union(a, b) => 1 + a.size() + b.size(),
            Regex::Star(a) | Regex::Plus(a) => 1 + a.size(),
            _ => 1,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Regex::Union(..) => 0,
            Regex::Concat(..) => 1,
            _ => 2,
        }
    }
}

/// Characters that must be escaped outside classes. `/` is included so that
/// printed patterns can sit between slashes in formula syntax.
fn is_meta(c: char) -> bool {
    matches!(c, '.' | '|' | '*' | '+' | '?' | '(' | ')' | '[' | ']' | '\\' | '/')
}

fn write_char(f: &mut fmt::Formatter<'_>, c: char, in_class: bool) -> fmt::Result {
    match c {
        '\n' => f.write_str("\\n"),
        '\t' => f.write_str("\\t"),
        '\r' => f.write_str("\\r"),
        c if c.is_control() || (c as u32) > 0x7E && !c.is_alphanumeric() => {
            write!(f, "\\u{{{:X}}}", c as u32)
        }
        c if in_class && matches!(c, ']' | '[' | '\\' | '^' | '-' | '/') => write!(f, "\\{c}"),
        c if !in_class && is_meta(c) => write!(f, "\\{c}"),
        c => write!(f, "{c}"),
    }
}

fn write_code(f: &mut fmt::Formatter<'_>, cp: u32) -> fmt::Result {
    match char::from_u32(cp) {
        Some(c) => write_char(f, c, true),
        None => write!(f, "\\u{{{cp:X}}}"),
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, r: &Regex, min: u8| {
            if r.precedence() < min {
                write!(f, "({r})")
            } else {
                write!(f, "{r}")
            }
        };
        match self {
            Regex::Empty => f.write_str("[]"),
            Regex::Epsilon => f.write_str("()"),
            Regex::Char(c) => write_char(f, *c, false),
            Regex::Any => f.write_str("."),
            Regex::Class(set) => {
                // a negated class is shorter when it covers most of the range
                let (neg, set) = if set.ranges().last().is_some_and(|r| r.1 == MAX_CHAR) {
                    (true, set.complement())
                } else {
                    (false, set.clone())
                };
                f.write_str("[")?;
                if neg {
                    f.write_str("^")?;
                }
                for &(lo, hi) in set.ranges() {
                    write_code(f, lo)?;
                    if hi > lo {
                        if hi > lo + 1 {
                            f.write_str("-")?;
                        }
                        write_code(f, hi)?;
                    }
                }
                f.write_str("]")
            }
            Regex::Concat(a, b) => {
                child(f, a, 1)?;
                // a trailing Epsilon prints as "()" and needs no separator
                child(f, b, 1)
            }
            Regex::Union(a, b) => {
                child(f, a, 0)?;
                f.write_str("|")?;
                child(f, b, 0)
            }
            Regex::Star(a) => {
                child(f, a, 2)?;
                f.write_str("*")
            }
            Regex::Plus(a) => {
                child(f, a, 2)?;
                f.write_str("+")
            }
        }
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

/// Parses the pattern dialect: literals, `.`, `|`, juxtaposition, `*`, `+`,
/// `?`, parentheses, classes `[a-z]` / `[^...]`, and backslash escapes
/// (`\n`, `\t`, `\r`, `\u{HEX}`, or any escaped punctuation).
pub fn parse_regex(text: &str) -> Result<Regex, RegexError> {
    let mut p = Parser { chars: text.char_indices().collect(), pos: 0, src: text };
    let r = p.union()?;
    if p.pos < p.chars.len() {
        return Err(p.err("unexpected `)`"));
    }
    Ok(r)
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> RegexError {
        let offset = self.chars.get(self.pos).map_or(self.src.len(), |c| c.0);
        RegexError::MalformedRegex { offset, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn union(&mut self) -> Result<Regex, RegexError> {
        let mut r = self.concat()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let rhs = self.concat()?;
            r = Regex::Union(Box::new(r), Box::new(rhs));
        }
        Ok(r)
    }

    fn concat(&mut self) -> Result<Regex, RegexError> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            parts.push(self.repeat()?);
        }
        let mut it = parts.into_iter().rev();
        Ok(match it.next() {
            None => Regex::Epsilon,
            Some(last) => it.fold(last, |acc, r| Regex::Concat(Box::new(r), Box::new(acc))),
        })
    }

    fn repeat(&mut self) -> Result<Regex, RegexError> {
        let mut r = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => r = Regex::Star(Box::new(r)),
                Some('+') => r = Regex::Plus(Box::new(r)),
                Some('?') => r = Regex::Union(Box::new(r), Box::new(Regex::Epsilon)),
                _ => return Ok(r),
            }
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Regex, RegexError> {
        match self.bump() {
            Some('(') => {
                let r = self.union()?;
                if self.bump() != Some(')') {
                    self.pos -= 1;
                    return Err(self.err("unclosed `(`"));
                }
                Ok(r)
            }
            Some('[') => self.class(),
            Some('.') => Ok(Regex::Any),
            Some('\\') => self.escape().map(Regex::Char),
            Some(c @ ('*' | '+' | '?')) => {
                self.pos -= 1;
                Err(self.err(&format!("`{c}` without operand")))
            }
            Some(']') => {
                self.pos -= 1;
                Err(self.err("unmatched `]`"))
            }
            Some(c) => Ok(Regex::Char(c)),
            None => Err(self.err("unexpected end")),
        }
    }

    fn escape(&mut self) -> Result<char, RegexError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some('u') => {
                if self.bump() != Some('{') {
                    self.pos -= 1;
                    return Err(self.err("expected `{` after \\u"));
                }
                let mut hex = String::new();
                while let Some(c) = self.bump() {
                    if c == '}' {
                        return u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or_else(|| self.err("invalid code point"));
                    }
                    hex.push(c);
                }
                Err(self.err("unclosed \\u{"))
            }
            Some(c) if !c.is_alphanumeric() => Ok(c),
            Some(_) => {
                self.pos -= 1;
                Err(self.err("unknown escape"))
            }
            None => Err(self.err("dangling backslash")),
        }
    }

    fn class_char(&mut self) -> Result<char, RegexError> {
        match self.bump() {
            Some('\\') => self.escape(),
            Some(c) => Ok(c),
            None => Err(self.err("unclosed `[`")),
        }
    }

    fn class(&mut self) -> Result<Regex, RegexError> {
        let negated = self.peek() == Some('^');
        if negated {
            self.pos += 1;
        }
        let mut ranges = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unclosed `[`")),
                Some(']') => {
                    self.pos += 1;
                    break;
                }
                _ => {}
            }
            let lo = self.class_char()?;
            let hi = if self.peek() == Some('-') && self.chars.get(self.pos + 1).is_some_and(|c| c.1 != ']') {
                self.pos += 1;
                self.class_char()?
            } else {
                lo
            };
            if lo > hi {
                return Err(self.err("reversed class range"));
            }
            ranges.push((lo as u32, hi as u32));
        }
        let set = CharSet::from_ranges(ranges);
        let set = if negated { set.complement() } else { set };
        Ok(if set.is_empty() { Regex::Empty } else { Regex::Class(set) })
    }
}

/// Whole-word membership `w ∈ L(e)`.
pub fn matches(e: &Regex, w: &str) -> bool {
    nfa::Nfa::new(e).matches(w)
}

/// Up to `max_count` distinct words of `L(e)` of length at most `max_len`,
/// shortest first. Characters are drawn from one representative per class of
/// characters the expression cannot tell apart.
pub fn enumerate_words(e: &Regex, max_len: usize, max_count: usize) -> Vec<String> {
    match KeyDfa::from_regexes(std::slice::from_ref(e), DEFAULT_STATE_CAP) {
        Ok(d) => d.enumerate_words(max_len, max_count),
        Err(_) => Vec::new(),
    }
}
