use super::{JnlBinary, JnlError, JnlUnary};
use crate::syntax::{Cursor, SyntaxError};

/// Parses a unary JNL formula.
///
/// ```text
/// phi   := phi || phi | phi && phi | !phi | true | false | (phi)
///        | [alpha] | eq(alpha, <json>) | eq(alpha, alpha)
/// alpha := alpha / alpha | @"key" | @/regex/ | #i | #i:j | #i:* | eps
///        | test(phi) | (alpha) | (alpha)*
/// ```
pub fn parse_jnl(text: &str) -> Result<JnlUnary, JnlError> {
    let mut c = Cursor::new(text);
    let phi = unary(&mut c)?;
    if !c.at_end() {
        return Ok(c.err("unexpected trailing input")?);
    }
    Ok(phi)
}

pub(crate) fn unary(c: &mut Cursor) -> Result<JnlUnary, SyntaxError> {
    let mut lhs = conjunction(c)?;
    while c.eat("||") {
        lhs = JnlUnary::or(lhs, conjunction(c)?);
    }
    Ok(lhs)
}

fn conjunction(c: &mut Cursor) -> Result<JnlUnary, SyntaxError> {
    let mut lhs = prefix(c)?;
    while c.eat("&&") {
        lhs = JnlUnary::and(lhs, prefix(c)?);
    }
    Ok(lhs)
}

fn prefix(c: &mut Cursor) -> Result<JnlUnary, SyntaxError> {
    if c.eat("!") {
        return Ok(JnlUnary::not(prefix(c)?));
    }
    if c.eat("(") {
        let phi = unary(c)?;
        c.expect(")")?;
        return Ok(phi);
    }
    if c.eat("[") {
        let alpha = binary(c)?;
        c.expect("]")?;
        return Ok(JnlUnary::Exists(alpha));
    }
    if c.eat_keyword("true") {
        return Ok(JnlUnary::Top);
    }
    if c.eat_keyword("false") {
        return Ok(JnlUnary::not(JnlUnary::Top));
    }
    if c.eat_keyword("eq") {
        c.expect("(")?;
        let alpha = binary(c)?;
        c.expect(",")?;
        let phi = match c.peek() {
            Some('{' | '[' | '"' | '0'..='9' | '-') => JnlUnary::EqConst(alpha, c.json()?),
            _ => JnlUnary::EqPaths(alpha, binary(c)?),
        };
        c.expect(")")?;
        return Ok(phi);
    }
    if c.peek() == Some('<') {
        return c.err("a test `<phi>` is a binary formula; write `[test(phi)]`");
    }
    c.err("expected a unary formula")
}

pub(crate) fn binary(c: &mut Cursor) -> Result<JnlBinary, SyntaxError> {
    let mut lhs = step(c)?;
    while c.eat("/") {
        lhs = JnlBinary::compose(lhs, step(c)?);
    }
    Ok(lhs)
}

fn step(c: &mut Cursor) -> Result<JnlBinary, SyntaxError> {
    if c.eat("@") {
        return match c.peek() {
            Some('"') => Ok(JnlBinary::Key(c.string()?)),
            Some('/') => Ok(JnlBinary::KeyRegex(c.regex()?)),
            _ => c.err("expected a quoted key or /regex/ after `@`"),
        };
    }
    if c.eat("#") {
        let i = index(c)?;
        if !c.eat(":") {
            return Ok(JnlBinary::Idx(i));
        }
        if c.eat("*") {
            return Ok(JnlBinary::IdxRange(i, None));
        }
        let at = c.pos;
        let j = index(c)?;
        if j < i {
            return Err(SyntaxError { offset: at, message: format!("empty interval {i}:{j}") });
        }
        return Ok(JnlBinary::IdxRange(i, Some(j)));
    }
    if c.eat_keyword("eps") {
        return Ok(JnlBinary::Eps);
    }
    if c.eat_keyword("test") {
        c.expect("(")?;
        let phi = unary(c)?;
        c.expect(")")?;
        return Ok(JnlBinary::test(phi));
    }
    if c.eat("(") {
        let alpha = binary(c)?;
        c.expect(")")?;
        if c.eat("*") {
            return Ok(JnlBinary::star(alpha));
        }
        return Ok(alpha);
    }
    c.err("expected a binary formula")
}

/// A 1-based array index.
pub(crate) fn index(c: &mut Cursor) -> Result<usize, SyntaxError> {
    let at = c.pos;
    let i = c.nat()?;
    if i == 0 {
        return Err(SyntaxError { offset: at, message: "array indices start at 1".into() });
    }
    usize::try_from(i).map_err(|_| SyntaxError { offset: at, message: "index out of range".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_document;

    #[test]
    fn shapes() {
        assert_eq!(
            parse_jnl(r#"eq(@"name", "Sue")"#).unwrap(),
            JnlUnary::EqConst(JnlBinary::Key("name".into()), parse_document("\"Sue\"").unwrap())
        );
        assert_eq!(parse_jnl("true").unwrap(), JnlUnary::Top);
        let phi = parse_jnl(r#"[@"a" / test([#1])] && [@"a" / test([@"b"])]"#).unwrap();
        let exists = |inner: JnlBinary| {
            JnlUnary::Exists(JnlBinary::compose(
                JnlBinary::Key("a".into()),
                JnlBinary::test(JnlUnary::Exists(inner)),
            ))
        };
        assert_eq!(phi, JnlUnary::and(exists(JnlBinary::Idx(1)), exists(JnlBinary::Key("b".into()))));
        assert_eq!(
            parse_jnl("eq(eps, eps)").unwrap(),
            JnlUnary::EqPaths(JnlBinary::Eps, JnlBinary::Eps)
        );
        assert_eq!(
            parse_jnl("[(#2:*)*]").unwrap(),
            JnlUnary::Exists(JnlBinary::star(JnlBinary::IdxRange(2, None)))
        );
    }

    #[test]
    fn errors() {
        for bad in ["", "[#0]", "[#3:2]", "[@a]", "true &&", "eq(@\"a\", true)", "[#1] x", "<true>", "[(eps]"] {
            assert!(parse_jnl(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn print_round_trip() {
        for s in [
            r#"[@"a" / test([#1])] && [@"a" / test([@"b"])]"#,
            r#"!(true || [@/a(b|c)a/]) && eq(#1:3 / (@"x")*, {"k":[1,"2"]})"#,
            r#"eq(test([@"b"]) / @"a", eps) || [#2:*]"#,
            "true && (true && !true)",
            r#"[@"a\"b" / (@"c" / #4)]"#,
        ] {
            let phi = parse_jnl(s).unwrap();
            assert_eq!(parse_jnl(&phi.to_string()).unwrap(), phi, "{s} -> {phi}");
        }
    }
}
