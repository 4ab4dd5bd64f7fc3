//! Lexing helpers shared by the formula parsers.

use thiserror::Error;

use crate::regex::{parse_regex, Pattern};
use crate::tree::{parse_document, JsonTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

pub(crate) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn err<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { offset: self.pos, message: message.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.ws();
        self.rest().chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Consumes `tok` if the input continues with it.
    pub fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    /// Consumes the keyword `kw` only if it is not followed by an identifier
    /// character.
    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        self.ws();
        let rest = self.rest();
        if rest.starts_with(kw) && !rest[kw.len()..].starts_with(|c: char| c.is_alphanumeric() || c == '_') {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &str) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    pub fn ident(&mut self) -> Option<&'a str> {
        self.ws();
        let rest = self.rest();
        if !rest.starts_with(|c: char| c.is_alphabetic() || c == '_') {
            return None;
        }
        let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        self.pos += len;
        Some(&rest[..len])
    }

    pub fn nat(&mut self) -> Result<u64, SyntaxError> {
        self.ws();
        let rest = self.rest();
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return self.err("expected a natural number");
        }
        match rest[..len].parse() {
            Ok(n) => {
                self.pos += len;
                Ok(n)
            }
            Err(_) => self.err("number out of range"),
        }
    }

    /// A JSON string literal.
    pub fn string(&mut self) -> Result<String, SyntaxError> {
        self.ws();
        let start = self.pos;
        let end = scan_string(self.src, start).ok_or_else(|| SyntaxError {
            offset: start,
            message: "unterminated string".into(),
        })?;
        let s = serde_json::from_str(&self.src[start..end]).map_err(|e| SyntaxError {
            offset: start,
            message: format!("bad string literal: {e}"),
        })?;
        self.pos = end;
        Ok(s)
    }

    /// A `/regex/` literal; `\/` stands for a slash inside.
    pub fn regex(&mut self) -> Result<Pattern, SyntaxError> {
        self.expect("/")?;
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = start;
        while i < bytes.len() && bytes[i] != b'/' {
            i += if bytes[i] == b'\\' { 2 } else { 1 };
        }
        if i >= bytes.len() {
            return self.err("unterminated regex literal");
        }
        let body = &self.src[start..i];
        let pattern = Pattern::new(parse_regex(body).map_err(|e| SyntaxError {
            offset: start,
            message: e.to_string(),
        })?);
        self.pos = i + 1;
        Ok(pattern)
    }

    /// A JSON document literal, delimited by bracket balancing.
    pub fn json(&mut self) -> Result<JsonTree, SyntaxError> {
        self.ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let end = match bytes.get(start) {
            Some(b'"') => scan_string(self.src, start),
            Some(b'{' | b'[') => {
                let mut depth = 0usize;
                let mut i = start;
                let mut end = None;
                while i < bytes.len() {
                    match bytes[i] {
                        b'"' => match scan_string(self.src, i) {
                            Some(e) => {
                                i = e;
                                continue;
                            }
                            None => break,
                        },
                        b'{' | b'[' => depth += 1,
                        b'}' | b']' => {
                            depth -= 1;
                            if depth == 0 {
                                end = Some(i + 1);
                                break;
                            }
                        }
                        _ => {}
                    }
                    i += 1;
                }
                end
            }
            Some(_) => {
                let rest = self.rest();
                let len = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || matches!(c, '-' | '+' | '.')))
                    .unwrap_or(rest.len());
                (len > 0).then_some(start + len)
            }
            None => None,
        };
        let Some(end) = end else {
            return self.err("expected a JSON value");
        };
        let tree = parse_document(&self.src[start..end]).map_err(|e| SyntaxError {
            offset: start,
            message: e.to_string(),
        })?;
        self.pos = end;
        Ok(tree)
    }
}

/// End offset (exclusive) of the JSON string starting at `start`.
fn scan_string(src: &str, start: usize) -> Option<usize> {
    let bytes = src.as_bytes();
    if bytes.get(start) != Some(&b'"') {
        return None;
    }
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => return Some(i + 1),
            _ => i += 1,
        }
    }
    None
}

/// Writes `w` as a JSON string literal.
pub(crate) fn quote(w: &str) -> String {
    serde_json::to_string(w).expect("strings always serialize")
}
