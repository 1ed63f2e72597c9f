//! Horn sequents over vanishing atoms and independence (Diers) atoms.
//!
//! File format, one declaration per line:
//!
//! ```text
//! context x : A, y : B
//! premise b(x) = 0
//! diers bang.X(x)
//! conclude x = 0          # or `conclude bottom`, or `conclude diers t1, t2`
//! ```

use serde::{Deserialize, Serialize};

use crate::dsl::{strip_comment, words};
use crate::quiver::Quiver;
use crate::term::{parse_term, Context, Term, TermError, Var};

/// `t_1, ..., t_n` (all `K0`-valued) are algebraically independent over the prime field.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DiersAtom {
    pub terms: Vec<Term>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Conclusion {
    /// The term vanishes.
    Eq(Term),
    Diers(DiersAtom),
    Bottom,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct AlgebraicSequent {
    pub context: Context,
    /// Each premise term is asserted to vanish.
    pub premises: Vec<Term>,
    pub diers: Vec<DiersAtom>,
    pub conclusion: Conclusion,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequentError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Term { line: usize, source: TermError },
    #[error("a term does not share the sequent's context")]
    ContextMismatch,
    #[error("diers atoms take terms of sort K0")]
    DiersSort,
    #[error("missing `conclude` line")]
    NoConclusion,
}

impl AlgebraicSequent {
    pub fn new(
        context: Context,
        premises: Vec<Term>,
        diers: Vec<DiersAtom>,
        conclusion: Conclusion,
    ) -> Result<Self, SequentError> {
        let s = AlgebraicSequent { context, premises, diers, conclusion };
        s.check()?;
        Ok(s)
    }

    /// `premises |- t = 0`.
    pub fn equation(context: Context, premises: Vec<Term>, t: Term) -> Self {
        AlgebraicSequent::new(context, premises, Vec::new(), Conclusion::Eq(t)).expect("shared context")
    }

    fn check(&self) -> Result<(), SequentError> {
        let ok = |t: &Term| t.context() == &self.context;
        let mut all: Vec<&Term> = self.premises.iter().collect();
        for d in &self.diers {
            all.extend(&d.terms);
        }
        match &self.conclusion {
            Conclusion::Eq(t) => all.push(t),
            Conclusion::Diers(d) => all.extend(&d.terms),
            Conclusion::Bottom => {}
        }
        if all.into_iter().all(ok) {
            Ok(())
        } else {
            Err(SequentError::ContextMismatch)
        }
    }

    /// Premises with zero terms dropped.
    pub fn live_premises(&self) -> impl Iterator<Item = &Term> {
        self.premises.iter().filter(|t| !t.is_zero())
    }

    pub fn has_diers(&self) -> bool {
        !self.diers.is_empty() || matches!(self.conclusion, Conclusion::Diers(_))
    }

    /// Longest path occurring anywhere in the sequent.
    pub fn depth(&self) -> usize {
        let mut d = self.premises.iter().map(Term::depth).max().unwrap_or(0);
        for a in &self.diers {
            d = d.max(a.terms.iter().map(Term::depth).max().unwrap_or(0));
        }
        match &self.conclusion {
            Conclusion::Eq(t) => d.max(t.depth()),
            Conclusion::Diers(a) => d.max(a.terms.iter().map(Term::depth).max().unwrap_or(0)),
            Conclusion::Bottom => d,
        }
    }

    pub fn display(&self, q: &Quiver) -> String {
        let mut hyps: Vec<String> = self.premises.iter().map(|t| format!("{} = 0", t.display(q))).collect();
        hyps.extend(self.diers.iter().map(|d| format!("diers({})", diers_list(d, q))));
        let lhs = if hyps.is_empty() { "T".to_string() } else { hyps.join(" & ") };
        let rhs = match &self.conclusion {
            Conclusion::Eq(t) => format!("{} = 0", t.display(q)),
            Conclusion::Diers(d) => format!("diers({})", diers_list(d, q)),
            Conclusion::Bottom => "bottom".into(),
        };
        format!("[{}] {} |- {}", self.context.display(q), lhs, rhs)
    }

    /// Serialization in the sequent file format.
    pub fn to_file(&self, q: &Quiver) -> String {
        let mut out = String::new();
        if !self.context.is_empty() {
            out.push_str(&format!("context {}\n", self.context.display(q)));
        }
        for p in &self.premises {
            out.push_str(&format!("premise {} = 0\n", p.display(q)));
        }
        for d in &self.diers {
            out.push_str(&format!("diers {}\n", diers_list(d, q)));
        }
        match &self.conclusion {
            Conclusion::Eq(t) => out.push_str(&format!("conclude {} = 0\n", t.display(q))),
            Conclusion::Diers(d) => out.push_str(&format!("conclude diers {}\n", diers_list(d, q))),
            Conclusion::Bottom => out.push_str("conclude bottom\n"),
        }
        out
    }
}

fn diers_list(d: &DiersAtom, q: &Quiver) -> String {
    d.terms.iter().map(|t| t.display(q)).collect::<Vec<_>>().join(", ")
}

/// Splits on top-level commas.
fn split_commas(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn equation(q: &Quiver, ctx: &Context, body: &str, line: usize) -> Result<Term, SequentError> {
    let term_err = |source| SequentError::Term { line, source };
    match body.split_once('=') {
        Some((l, r)) => {
            let raw_l = crate::term::parse_raw_term(l).map_err(term_err)?;
            let raw_r = crate::term::parse_raw_term(r).map_err(term_err)?;
            let raw = crate::term::RawTerm::minus(raw_l, raw_r);
            crate::term::normalize_term(&raw, q, ctx, None).map_err(term_err)
        }
        None => parse_term(body, q, ctx, None).map_err(term_err),
    }
}

fn diers_atom(q: &Quiver, ctx: &Context, body: &str, line: usize) -> Result<DiersAtom, SequentError> {
    let mut terms = Vec::new();
    for part in split_commas(body) {
        let t = parse_term(part, q, ctx, Some(q.coefficient())).map_err(|source| SequentError::Term { line, source })?;
        if t.target() != q.coefficient() {
            return Err(SequentError::DiersSort);
        }
        terms.push(t);
    }
    Ok(DiersAtom { terms })
}

pub fn parse_sequent(text: &str, q: &Quiver) -> Result<AlgebraicSequent, SequentError> {
    let mut ctx = Context::empty();
    let mut premises = Vec::new();
    let mut diers = Vec::new();
    let mut conclusion = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let (head, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let syntax = |msg: String| SequentError::Syntax { line, msg };
        if conclusion.is_some() {
            return Err(syntax("nothing may follow `conclude`".into()));
        }
        match head {
            "context" => {
                if !premises.is_empty() || !diers.is_empty() || !ctx.is_empty() {
                    return Err(syntax("`context` must come first and only once".into()));
                }
                let mut vars = Vec::new();
                for part in split_commas(rest) {
                    let (name, sort) =
                        part.split_once(':').ok_or_else(|| syntax(format!("expected `name : Sort`, found `{}`", part.trim())))?;
                    let name = name.trim();
                    let ws = words(sort);
                    if ws.len() != 1 || !crate::dsl::is_identifier(name) {
                        return Err(syntax(format!("expected `name : Sort`, found `{}`", part.trim())));
                    }
                    let sort = q.sort_by_name(ws[0].text).ok_or_else(|| syntax(format!("unknown sort `{}`", ws[0].text)))?;
                    if vars.iter().any(|v: &Var| v.name == name) {
                        return Err(syntax(format!("variable `{name}` declared twice")));
                    }
                    vars.push(Var { name: name.into(), sort });
                }
                ctx = Context(vars);
            }
            "premise" => premises.push(equation(q, &ctx, rest, line)?),
            "diers" => diers.push(diers_atom(q, &ctx, rest, line)?),
            "conclude" => {
                conclusion = Some(if rest == "bottom" {
                    Conclusion::Bottom
                } else if let Some(d) = rest.strip_prefix("diers") {
                    Conclusion::Diers(diers_atom(q, &ctx, d, line)?)
                } else {
                    Conclusion::Eq(equation(q, &ctx, rest, line)?)
                });
            }
            other => return Err(syntax(format!("unknown keyword `{other}`"))),
        }
    }
    let conclusion = conclusion.ok_or(SequentError::NoConclusion)?;
    AlgebraicSequent::new(ctx, premises, diers, conclusion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_quiver;

    fn quiver() -> Quiver {
        parse_quiver(
            "sort A = homology X _ 0\nsort B = homology Y _ 0\nsort C = homology Z _ 0\n\
             edge functorial f : A -> B over f\nedge functorial g : B -> C over g\npair f g\n",
        )
        .unwrap()
    }

    #[test]
    fn parse_and_reprint() {
        let q = quiver();
        let src = "context x : B\npremise g(x) = 0\nconclude x = 0\n";
        let s = parse_sequent(src, &q).unwrap();
        assert_eq!(s.premises.len(), 1);
        assert_eq!(s.to_file(&q), src);
        assert_eq!(parse_sequent(&s.to_file(&q), &q).unwrap(), s);
    }

    #[test]
    fn equations_move_to_one_side() {
        let q = quiver();
        let s = parse_sequent("context x : A, y : A\nconclude f(x) = f(y)\n", &q).unwrap();
        match s.conclusion {
            Conclusion::Eq(t) => assert_eq!(t.display(&q), "f(x) - f(y)"),
            _ => panic!("expected an equation"),
        }
    }

    #[test]
    fn errors() {
        let q = quiver();
        assert!(matches!(parse_sequent("context x : B\npremise g(x) = 0\n", &q), Err(SequentError::NoConclusion)));
        assert!(matches!(parse_sequent("context x : Q\nconclude x = 0\n", &q), Err(SequentError::Syntax { line: 1, .. })));
        assert!(matches!(parse_sequent("context x : A\nconclude g(x) = 0\n", &q), Err(SequentError::Term { line: 2, .. })));
        assert!(parse_sequent("conclude bottom\n", &q).is_ok());
    }
}
