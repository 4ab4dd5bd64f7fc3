//! Translations between JNL without path equality and star, and JSL whose
//! only node test is `same(A)`. Both preserve the set of satisfying nodes.
//! Star is handled separately by a translation into recursive JSL.

use thiserror::Error;

use crate::jnl::{JnlBinary, JnlUnary};
use crate::jsl::{JslFormula, NodeTest};
use crate::recursive::{is_reserved, RecursiveJsl};
use crate::regex::Pattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("construct outside the translatable fragment: {0}")]
    FragmentViolation(String),
}

pub fn jnl_to_jsl(phi: &JnlUnary) -> Result<JslFormula, TranslateError> {
    Ok(match phi {
        JnlUnary::Top => JslFormula::True,
        JnlUnary::Not(a) => JslFormula::not(jnl_to_jsl(a)?),
        JnlUnary::And(a, b) => JslFormula::and(jnl_to_jsl(a)?, jnl_to_jsl(b)?),
        JnlUnary::Or(a, b) => JslFormula::or(jnl_to_jsl(a)?, jnl_to_jsl(b)?),
        JnlUnary::Exists(a) => reach(a, JslFormula::True)?,
        JnlUnary::EqConst(a, c) => reach(a, JslFormula::Test(NodeTest::SameAs(c.clone())))?,
        JnlUnary::EqPaths(..) => return Err(TranslateError::FragmentViolation(format!("path equality `{phi}`"))),
    })
}

/// A formula holding at `n` iff some node reachable from `n` through `alpha`
/// satisfies `k`.
fn reach(alpha: &JnlBinary, k: JslFormula) -> Result<JslFormula, TranslateError> {
    Ok(match alpha {
        JnlBinary::Eps => k,
        JnlBinary::Key(w) => JslFormula::dia_key(Pattern::word(w), k),
        JnlBinary::KeyRegex(e) => JslFormula::dia_key(e.clone(), k),
        JnlBinary::Idx(i) => JslFormula::dia_idx(*i, Some(*i), k),
        JnlBinary::IdxRange(i, j) => JslFormula::dia_idx(*i, *j, k),
        JnlBinary::Compose(a, b) => reach(a, reach(b, k)?)?,
        JnlBinary::Test(phi) => {
            let test = jnl_to_jsl(phi)?;
            if k == JslFormula::True {
                test
            } else {
                JslFormula::and(k, test)
            }
        }
        JnlBinary::Star(_) => return Err(TranslateError::FragmentViolation(format!("star `{alpha}`"))),
    })
}

pub fn jsl_to_jnl(phi: &JslFormula) -> Result<JnlUnary, TranslateError> {
    let exists = |axis: JnlBinary, body: &JslFormula| -> Result<JnlUnary, TranslateError> {
        let inner = jsl_to_jnl(body)?;
        Ok(if inner == JnlUnary::Top {
            JnlUnary::Exists(axis)
        } else {
            JnlUnary::Exists(JnlBinary::compose(axis, JnlBinary::test(inner)))
        })
    };
    let key_axis = |e: &Pattern| match e.as_word() {
        Some(w) => JnlBinary::Key(w.to_string()),
        None => JnlBinary::KeyRegex(e.clone()),
    };
    let idx_axis = |i: usize, j: Option<usize>| {
        if j == Some(i) {
            JnlBinary::Idx(i)
        } else {
            JnlBinary::IdxRange(i, j)
        }
    };
    let neg = |f: &JslFormula| JslFormula::not(f.clone());
    Ok(match phi {
        JslFormula::True => JnlUnary::Top,
        JslFormula::Not(a) => JnlUnary::not(jsl_to_jnl(a)?),
        JslFormula::And(a, b) => JnlUnary::and(jsl_to_jnl(a)?, jsl_to_jnl(b)?),
        JslFormula::Or(a, b) => JnlUnary::or(jsl_to_jnl(a)?, jsl_to_jnl(b)?),
        JslFormula::Test(NodeTest::SameAs(c)) => JnlUnary::EqConst(JnlBinary::Eps, c.clone()),
        JslFormula::Test(t) => return Err(TranslateError::FragmentViolation(format!("node test `{t}`"))),
        JslFormula::DiaKey(e, a) => exists(key_axis(e), a)?,
        JslFormula::DiaIdx(i, j, a) => exists(idx_axis(*i, *j), a)?,
        JslFormula::BoxKey(e, a) => JnlUnary::not(exists(key_axis(e), &neg(a))?),
        JslFormula::BoxIdx(i, j, a) => JnlUnary::not(exists(idx_axis(*i, *j), &neg(a))?),
        JslFormula::Var(v) => return Err(TranslateError::FragmentViolation(format!("symbol `{v}`"))),
    })
}

/// Translates JNL with star, but without path equality, into a recursive
/// expression. Each starred subformula becomes a symbol defined as the
/// least set closed under one more iteration.
pub fn jnl_to_rjsl(phi: &JnlUnary) -> Result<RecursiveJsl, TranslateError> {
    let mut st = StarTranslator { defs: Vec::new(), next: 0 };
    let base = st.unary(phi)?;
    Ok(RecursiveJsl { definitions: st.defs, base })
}

struct StarTranslator {
    defs: Vec<(String, JslFormula)>,
    next: usize,
}

fn conj(a: JslFormula, b: JslFormula) -> JslFormula {
    match (a, b) {
        (JslFormula::True, x) | (x, JslFormula::True) => x,
        (a, b) => JslFormula::and(a, b),
    }
}

fn disj(a: Option<JslFormula>, b: Option<JslFormula>) -> Option<JslFormula> {
    match (a, b) {
        (Some(a), Some(b)) => Some(JslFormula::or(a, b)),
        (a, b) => a.or(b),
    }
}

impl StarTranslator {
    fn unary(&mut self, phi: &JnlUnary) -> Result<JslFormula, TranslateError> {
        Ok(match phi {
            JnlUnary::Top => JslFormula::True,
            JnlUnary::Not(a) => JslFormula::not(self.unary(a)?),
            JnlUnary::And(a, b) => JslFormula::and(self.unary(a)?, self.unary(b)?),
            JnlUnary::Or(a, b) => JslFormula::or(self.unary(a)?, self.unary(b)?),
            JnlUnary::Exists(a) => self.reach(a, JslFormula::True)?.unwrap_or_else(JslFormula::falsum),
            JnlUnary::EqConst(a, c) => self
                .reach(a, JslFormula::Test(NodeTest::SameAs(c.clone())))?
                .unwrap_or_else(JslFormula::falsum),
            JnlUnary::EqPaths(..) => return Err(TranslateError::FragmentViolation(format!("path equality `{phi}`"))),
        })
    }

    /// `None` stands for the empty set.
    fn reach(&mut self, alpha: &JnlBinary, k: JslFormula) -> Result<Option<JslFormula>, TranslateError> {
        let here = self.ident(alpha)?.map(|t| conj(t, k.clone()));
        let away = self.strict(alpha, k)?;
        Ok(disj(here, away))
    }

    /// The test a node must pass to reach itself through `alpha`.
    fn ident(&mut self, alpha: &JnlBinary) -> Result<Option<JslFormula>, TranslateError> {
        Ok(match alpha {
            JnlBinary::Eps | JnlBinary::Star(_) => Some(JslFormula::True),
            JnlBinary::Test(phi) => Some(self.unary(phi)?),
            JnlBinary::Key(_) | JnlBinary::KeyRegex(_) | JnlBinary::Idx(_) | JnlBinary::IdxRange(..) => None,
            JnlBinary::Compose(a, b) => match (self.ident(a)?, self.ident(b)?) {
                (Some(a), Some(b)) => Some(conj(a, b)),
                _ => None,
            },
        })
    }

    /// Reaching a `k` node through `alpha` by at least one step.
    fn strict(&mut self, alpha: &JnlBinary, k: JslFormula) -> Result<Option<JslFormula>, TranslateError> {
        Ok(match alpha {
            JnlBinary::Eps | JnlBinary::Test(_) => None,
            JnlBinary::Key(w) => Some(JslFormula::dia_key(Pattern::word(w), k)),
            JnlBinary::KeyRegex(e) => Some(JslFormula::dia_key(e.clone(), k)),
            JnlBinary::Idx(i) => Some(JslFormula::dia_idx(*i, Some(*i), k)),
            JnlBinary::IdxRange(i, j) => Some(JslFormula::dia_idx(*i, *j, k)),
            JnlBinary::Compose(a, b) => {
                let first = match self.reach(b, k.clone())? {
                    Some(rest) => self.strict(a, rest)?,
                    None => None,
                };
                let second = match (self.ident(a)?, self.strict(b, k)?) {
                    (Some(t), Some(s)) => Some(conj(t, s)),
                    _ => None,
                };
                disj(first, second)
            }
            JnlBinary::Star(a) => {
                let name = self.fresh();
                let var = JslFormula::Var(name.clone());
                match self.strict(a, JslFormula::or(k, var.clone()))? {
                    Some(body) => {
                        self.defs.push((name, body));
                        Some(var)
                    }
                    None => None,
                }
            }
        })
    }

    fn fresh(&mut self) -> String {
        loop {
            self.next += 1;
            let name = format!("star{}", self.next);
            if !is_reserved(&name) {
                return name;
            }
        }
    }
}
