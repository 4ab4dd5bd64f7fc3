use super::{JslError, JslFormula, NodeTest};
use crate::jnl::parse::index;
use crate::regex::Pattern;
use crate::syntax::{Cursor, SyntaxError};

pub(crate) const RESERVED: &[&str] = &[
    "true", "false", "arr", "obj", "str", "int", "unique", "pattern", "min", "max", "multOf", "minCh", "maxCh",
    "same", "box", "dia", "let", "in",
];

/// Parses a closed JSL formula.
///
/// ```text
/// phi := phi || phi | phi && phi | !phi | (phi) | true | false
///      | arr | obj | str | int | unique | pattern(/e/) | min(i) | max(i)
///      | multOf(i) | minCh(i) | maxCh(i) | same(<json>)
///      | box(M) phi | dia(M) phi
/// M   := /e/ | "key" | i | i:j | i:*
/// ```
pub fn parse_jsl(text: &str) -> Result<JslFormula, JslError> {
    let phi = parse_jsl_open(text)?;
    if let Some(v) = phi.symbols().into_iter().next() {
        return Err(JslError::FreeSymbol(v));
    }
    Ok(phi)
}

/// Like [`parse_jsl`], but identifiers that are not keywords are read as
/// definition symbols.
pub fn parse_jsl_open(text: &str) -> Result<JslFormula, JslError> {
    let mut c = Cursor::new(text);
    let phi = formula(&mut c)?;
    if !c.at_end() {
        c.err("unexpected trailing input")?;
    }
    Ok(phi)
}

pub(crate) fn formula(c: &mut Cursor) -> Result<JslFormula, SyntaxError> {
    let mut lhs = conjunction(c)?;
    while c.eat("||") {
        lhs = JslFormula::or(lhs, conjunction(c)?);
    }
    Ok(lhs)
}

fn conjunction(c: &mut Cursor) -> Result<JslFormula, SyntaxError> {
    let mut lhs = prefix(c)?;
    while c.eat("&&") {
        lhs = JslFormula::and(lhs, prefix(c)?);
    }
    Ok(lhs)
}

fn arg_nat(c: &mut Cursor) -> Result<u64, SyntaxError> {
    c.expect("(")?;
    let n = c.nat()?;
    c.expect(")")?;
    Ok(n)
}

fn prefix(c: &mut Cursor) -> Result<JslFormula, SyntaxError> {
    if c.eat("!") {
        return Ok(JslFormula::not(prefix(c)?));
    }
    if c.eat("(") {
        let phi = formula(c)?;
        c.expect(")")?;
        return Ok(phi);
    }
    let at = c.pos;
    let Some(word) = c.ident() else {
        return c.err("expected a formula");
    };
    let t = |t| Ok(JslFormula::Test(t));
    match word {
        "true" => Ok(JslFormula::True),
        "false" => Ok(JslFormula::falsum()),
        "arr" => t(NodeTest::Arr),
        "obj" => t(NodeTest::Obj),
        "str" => t(NodeTest::Str),
        "int" => t(NodeTest::Int),
        "unique" => t(NodeTest::Unique),
        "pattern" => {
            c.expect("(")?;
            let e = c.regex()?;
            c.expect(")")?;
            t(NodeTest::Pattern(e))
        }
        "min" => t(NodeTest::Min(arg_nat(c)?)),
        "max" => t(NodeTest::Max(arg_nat(c)?)),
        "multOf" => t(NodeTest::MultOf(arg_nat(c)?)),
        "minCh" => t(NodeTest::MinCh(arg_nat(c)? as usize)),
        "maxCh" => t(NodeTest::MaxCh(arg_nat(c)? as usize)),
        "same" => {
            c.expect("(")?;
            let a = c.json()?;
            c.expect(")")?;
            t(NodeTest::SameAs(a))
        }
        "box" | "dia" => {
            let is_box = word == "box";
            c.expect("(")?;
            let modality = match c.peek() {
                Some('/') => Modality::Key(c.regex()?),
                Some('"') => Modality::Key(Pattern::word(&c.string()?)),
                Some('0'..='9') => {
                    let i = index(c)?;
                    if !c.eat(":") {
                        Modality::Idx(i, Some(i))
                    } else if c.eat("*") {
                        Modality::Idx(i, None)
                    } else {
                        let at = c.pos;
                        let j = index(c)?;
                        if j < i {
                            return Err(SyntaxError { offset: at, message: format!("empty interval {i}:{j}") });
                        }
                        Modality::Idx(i, Some(j))
                    }
                }
                _ => return c.err("expected /regex/, \"key\" or an index interval"),
            };
            c.expect(")")?;
            let body = prefix(c)?;
            Ok(match (is_box, modality) {
                (true, Modality::Key(e)) => JslFormula::box_key(e, body),
                (false, Modality::Key(e)) => JslFormula::dia_key(e, body),
                (true, Modality::Idx(i, j)) => JslFormula::box_idx(i, j, body),
                (false, Modality::Idx(i, j)) => JslFormula::dia_idx(i, j, body),
            })
        }
        w if RESERVED.contains(&w) => Err(SyntaxError { offset: at, message: format!("unexpected keyword `{w}`") }),
        w => Ok(JslFormula::Var(w.to_string())),
    }
}

enum Modality {
    Key(Pattern),
    Idx(usize, Option<usize>),
}
