//! Terms: linear combinations of edge paths applied to context variables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsl::is_identifier;
use crate::quiver::{Composite, EdgeId, Quiver, SortId};
use crate::scalar::{Field, Q};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub sort: SortId,
}

/// Ordered typed variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Context(pub Vec<Var>);

impl Context {
    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub fn single(name: &str, sort: SortId) -> Self {
        Context(vec![Var { name: name.into(), sort }])
    }

    pub fn from_pairs<'a>(vars: impl IntoIterator<Item = (&'a str, SortId)>) -> Self {
        Context(vars.into_iter().map(|(n, s)| Var { name: n.into(), sort: s }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sort(&self, i: usize) -> SortId {
        self.0[i].sort
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v.name == name)
    }

    pub fn display(&self, q: &Quiver) -> String {
        self.0.iter().map(|v| format!("{} : {}", v.name, q.sort_name(v.sort))).collect::<Vec<_>>().join(", ")
    }
}

/// The thing a path is applied to: the unit `1` of `K0` or a context variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Atom {
    Unit,
    Var(usize),
}

/// `path(atom)`, with the path applied left to right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Monomial {
    pub atom: Atom,
    pub path: Vec<EdgeId>,
}

impl Monomial {
    pub fn new(atom: Atom, path: Vec<EdgeId>) -> Self {
        Monomial { atom, path }
    }

    pub fn source(&self, q: &Quiver, ctx: &Context) -> SortId {
        match self.atom {
            Atom::Unit => q.coefficient(),
            Atom::Var(i) => ctx.sort(i),
        }
    }

    pub fn target(&self, q: &Quiver, ctx: &Context) -> SortId {
        match self.path.last() {
            Some(e) => q.edge(*e).tgt,
            None => self.source(q, ctx),
        }
    }

    /// Appends `path` and renormalizes.
    pub fn then(&self, q: &Quiver, path: &[EdgeId]) -> Monomial {
        let mut p = self.path.clone();
        p.extend_from_slice(path);
        Monomial { atom: self.atom, path: normalize_path(q, &p) }
    }

    pub fn display(&self, q: &Quiver, ctx: &Context) -> String {
        let mut s = match self.atom {
            Atom::Unit => "1".to_string(),
            Atom::Var(i) => ctx.0[i].name.clone(),
        };
        for e in &self.path {
            s = format!("{}({})", q.edge_name(*e), s);
        }
        s
    }
}

/// Contracts identity edges and declared composites, leftmost first.
pub fn normalize_path(q: &Quiver, path: &[EdgeId]) -> Vec<EdgeId> {
    let mut stack: Vec<EdgeId> = Vec::with_capacity(path.len());
    for &e in path {
        if q.edge(e).is_identity() {
            continue;
        }
        let mut cur = Some(e);
        while let Some(g) = cur.take() {
            match stack.last().and_then(|&f| q.compose(g, f)) {
                Some(Composite::Identity) => {
                    stack.pop();
                }
                Some(Composite::Edge(h)) => {
                    stack.pop();
                    cur = Some(h);
                }
                None => stack.push(g),
            }
        }
    }
    stack
}

/// A normal-form term: no zero coefficients, distinct normalized paths.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Term {
    context: Context,
    target: SortId,
    body: BTreeMap<Monomial, Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("sort mismatch in `{at}`: expected {expected}, found {found}")]
    SortMismatch { at: String, expected: String, found: String },
    #[error("cannot infer the sort of `{0}`")]
    CannotInfer(String),
    #[error("column {col}: {msg}")]
    Parse { col: usize, msg: String },
}

impl Term {
    pub fn zero(context: Context, target: SortId) -> Term {
        Term { context, target, body: BTreeMap::new() }
    }

    pub fn var(context: &Context, i: usize) -> Term {
        Term::monomial(context.clone(), context.sort(i), Monomial::new(Atom::Var(i), Vec::new()))
    }

    pub fn unit(q: &Quiver, context: &Context) -> Term {
        Term::monomial(context.clone(), q.coefficient(), Monomial::new(Atom::Unit, Vec::new()))
    }

    fn monomial(context: Context, target: SortId, m: Monomial) -> Term {
        let mut body = BTreeMap::new();
        body.insert(m, Q::one());
        Term { context, target, body }
    }

    /// `path(atom)` after normalizing the path.
    pub fn path(q: &Quiver, context: &Context, atom: Atom, path: &[EdgeId]) -> Term {
        let m = Monomial::new(atom, normalize_path(q, path));
        let target = m.target(q, context);
        Term::monomial(context.clone(), target, m)
    }

    /// Builds a term from already-normalized monomials; zero coefficients are dropped.
    pub fn from_monomials(context: Context, target: SortId, items: impl IntoIterator<Item = (Monomial, Q)>) -> Term {
        let mut t = Term::zero(context, target);
        for (m, c) in items {
            t.add_monomial(m, c);
        }
        t
    }

    fn add_monomial(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.body.entry(m.clone()).or_insert_with(Q::zero);
        *entry = entry.plus(&c);
        if entry.is_zero() {
            self.body.remove(&m);
        }
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn target(&self) -> SortId {
        self.target
    }

    pub fn body(&self) -> &BTreeMap<Monomial, Q> {
        &self.body
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_empty()
    }

    /// Longest path among the monomials.
    pub fn depth(&self) -> usize {
        self.body.keys().map(|m| m.path.len()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Term) -> Term {
        assert_eq!(self.target, o.target, "adding terms of different sorts");
        let mut t = self.clone();
        for (m, c) in &o.body {
            t.add_monomial(m.clone(), c.clone());
        }
        t
    }

    pub fn sub(&self, o: &Term) -> Term {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Term {
        self.scale(&Q::from_i64(-1))
    }

    pub fn scale(&self, c: &Q) -> Term {
        if c.is_zero() {
            return Term::zero(self.context.clone(), self.target);
        }
        Term {
            context: self.context.clone(),
            target: self.target,
            body: self.body.iter().map(|(m, x)| (m.clone(), x.times(c))).collect(),
        }
    }

    /// Post-composes an edge.
    pub fn apply(&self, q: &Quiver, e: EdgeId) -> Result<Term, TermError> {
        let edge = q.edge(e);
        if edge.src != self.target {
            return Err(TermError::SortMismatch {
                at: edge.name.clone(),
                expected: q.sort_name(edge.src).into(),
                found: q.sort_name(self.target).into(),
            });
        }
        Ok(self.apply_unchecked(q, &[e], edge.tgt))
    }

    pub fn apply_path(&self, q: &Quiver, path: &[EdgeId]) -> Result<Term, TermError> {
        let mut t = self.clone();
        for &e in path {
            t = t.apply(q, e)?;
        }
        Ok(t)
    }

    fn apply_unchecked(&self, q: &Quiver, path: &[EdgeId], target: SortId) -> Term {
        let mut t = Term::zero(self.context.clone(), target);
        for (m, c) in &self.body {
            t.add_monomial(m.then(q, path), c.clone());
        }
        t
    }

    /// Replaces variable `i` by `subs[i]`; all substitutes share `context`.
    pub fn substitute(&self, q: &Quiver, context: &Context, subs: &[Term]) -> Term {
        assert_eq!(subs.len(), self.context.len(), "one substitute per variable");
        let mut t = Term::zero(context.clone(), self.target);
        for (m, c) in &self.body {
            match m.atom {
                Atom::Unit => t.add_monomial(m.clone(), c.clone()),
                Atom::Var(i) => {
                    let s = &subs[i];
                    assert_eq!(s.target, self.context.sort(i), "substitute has the wrong sort");
                    for (m2, c2) in &s.body {
                        t.add_monomial(m2.then(q, &m.path), c.times(c2));
                    }
                }
            }
        }
        t
    }

    /// Same body over a different context with the same variable sorts.
    pub fn with_context(&self, context: Context) -> Term {
        Term { context, target: self.target, body: self.body.clone() }
    }

    /// Variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .body
            .keys()
            .filter_map(|m| match m.atom {
                Atom::Var(i) => Some(i),
                Atom::Unit => None,
            })
            .collect();
        v.dedup();
        v
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.body.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.body.iter().enumerate() {
            let mono = m.display(q, &self.context);
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mag.is_one() {
                out.push_str(&mono);
            } else if m.atom == Atom::Unit && m.path.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

/// An unnormalized term tree, as parsed or constructed by hand.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RawTerm {
    Var(String),
    One,
    Zero,
    Apply(String, Box<RawTerm>),
    Sum(Vec<RawTerm>),
    Scale(Q, Box<RawTerm>),
}

impl RawTerm {
    pub fn var(name: &str) -> RawTerm {
        RawTerm::Var(name.into())
    }

    pub fn apply(edge: &str, t: RawTerm) -> RawTerm {
        RawTerm::Apply(edge.into(), Box::new(t))
    }

    pub fn scale(c: i64, t: RawTerm) -> RawTerm {
        RawTerm::Scale(Q::from_i64(c), Box::new(t))
    }

    pub fn minus(a: RawTerm, b: RawTerm) -> RawTerm {
        RawTerm::Sum(vec![a, RawTerm::scale(-1, b)])
    }
}

impl fmt::Display for RawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawTerm::Var(v) => write!(f, "{v}"),
            RawTerm::One => write!(f, "1"),
            RawTerm::Zero => write!(f, "0"),
            RawTerm::Apply(e, t) => write!(f, "{e}({t})"),
            RawTerm::Sum(ts) => {
                if ts.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            RawTerm::Scale(c, t) => write!(f, "{c}*{t}"),
        }
    }
}

fn mismatch(at: &RawTerm, q: &Quiver, expected: SortId, found: SortId) -> TermError {
    TermError::SortMismatch { at: at.to_string(), expected: q.sort_name(expected).into(), found: q.sort_name(found).into() }
}

/// Sort of a raw term, `None` when it is built from `0` only.
pub fn infer_sort(raw: &RawTerm, q: &Quiver, ctx: &Context) -> Result<Option<SortId>, TermError> {
    match raw {
        RawTerm::Var(v) => {
            let i = ctx.index_of(v).ok_or_else(|| TermError::UnknownSymbol(v.clone()))?;
            Ok(Some(ctx.sort(i)))
        }
        RawTerm::One => Ok(Some(q.coefficient())),
        RawTerm::Zero => Ok(None),
        RawTerm::Apply(name, t) => {
            let inner = infer_sort(t, q, ctx)?;
            if name == "id" {
                return Ok(inner);
            }
            let e = q.edge_by_name(name).ok_or_else(|| TermError::UnknownSymbol(name.clone()))?;
            let edge = q.edge(e);
            if let Some(s) = inner {
                if s != edge.src {
                    return Err(mismatch(t, q, edge.src, s));
                }
            }
            Ok(Some(edge.tgt))
        }
        RawTerm::Scale(_, t) => infer_sort(t, q, ctx),
        RawTerm::Sum(ts) => {
            let mut sort = None;
            for t in ts {
                if let Some(s) = infer_sort(t, q, ctx)? {
                    match sort {
                        None => sort = Some(s),
                        Some(prev) if prev != s => return Err(mismatch(t, q, prev, s)),
                        _ => {}
                    }
                }
            }
            Ok(sort)
        }
    }
}

/// Normal form of a raw term. `expected` pins the sort when it cannot be inferred.
pub fn normalize_term(raw: &RawTerm, q: &Quiver, ctx: &Context, expected: Option<SortId>) -> Result<Term, TermError> {
    let target = match (infer_sort(raw, q, ctx)?, expected) {
        (Some(s), Some(e)) if s != e => return Err(mismatch(raw, q, e, s)),
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => return Err(TermError::CannotInfer(raw.to_string())),
    };
    Ok(build(raw, q, ctx, target))
}

fn build(raw: &RawTerm, q: &Quiver, ctx: &Context, target: SortId) -> Term {
    match raw {
        RawTerm::Var(v) => Term::var(ctx, ctx.index_of(v).expect("checked by inference")),
        RawTerm::One => Term::unit(q, ctx),
        RawTerm::Zero => Term::zero(ctx.clone(), target),
        RawTerm::Apply(name, t) => {
            if name == "id" {
                return build(t, q, ctx, target);
            }
            let e = q.edge_by_name(name).expect("checked by inference");
            let edge = q.edge(e);
            build(t, q, ctx, edge.src).apply_unchecked(q, &[e], edge.tgt)
        }
        RawTerm::Scale(c, t) => build(t, q, ctx, target).scale(c),
        RawTerm::Sum(ts) => {
            let mut acc = Term::zero(ctx.clone(), target);
            for t in ts {
                acc = acc.add(&build(t, q, ctx, target));
            }
            acc
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, TermError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            _ if c.is_whitespace() => i += 1,
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            _ if c.is_ascii_digit() => {
                let s = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Num(chars[s..i].iter().collect()), col));
            }
            _ if c.is_alphabetic() || c == '_' || c == '!' => {
                let s = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '.' | '!' | '\'')) {
                    i += 1;
                }
                let word: String = chars[s..i].iter().collect();
                debug_assert!(is_identifier(&word));
                out.push((Tok::Ident(word), col));
            }
            _ => return Err(TermError::Parse { col, msg: format!("unexpected character `{c}`") }),
        }
    }
    Ok(out)
}

struct TermParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl TermParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn err(&self, msg: impl Into<String>) -> TermError {
        TermError::Parse { col: self.col(), msg: msg.into() }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RawTerm, TermError> {
        let mut parts = Vec::new();
        let first_neg = self.eat(&Tok::Minus);
        let t = self.summand()?;
        parts.push(if first_neg { RawTerm::Scale(Q::from_i64(-1), Box::new(t)) } else { t });
        loop {
            if self.eat(&Tok::Plus) {
                parts.push(self.summand()?);
            } else if self.eat(&Tok::Minus) {
                let t = self.summand()?;
                parts.push(RawTerm::Scale(Q::from_i64(-1), Box::new(t)));
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { RawTerm::Sum(parts) })
    }

    fn number(&mut self) -> Result<Q, TermError> {
        let Some(Tok::Num(n)) = self.peek().cloned() else {
            return Err(self.err("expected a number"));
        };
        self.pos += 1;
        let mut s = n;
        if self.eat(&Tok::Slash) {
            let Some(Tok::Num(d)) = self.peek().cloned() else {
                return Err(self.err("expected a denominator"));
            };
            self.pos += 1;
            s = format!("{s}/{d}");
        }
        s.parse::<Q>().map_err(|e| self.err(e.to_string()))
    }

    fn summand(&mut self) -> Result<RawTerm, TermError> {
        if matches!(self.peek(), Some(Tok::Num(_))) {
            let c = self.number()?;
            if self.eat(&Tok::Star) {
                let t = self.atom()?;
                return Ok(RawTerm::Scale(c, Box::new(t)));
            }
            return Ok(if c.is_zero() {
                RawTerm::Zero
            } else if c.is_one() {
                RawTerm::One
            } else {
                RawTerm::Scale(c, Box::new(RawTerm::One))
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<RawTerm, TermError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let arg = self.expr()?;
                    if !self.eat(&Tok::RParen) {
                        return Err(self.err("expected `)`"));
                    }
                    Ok(RawTerm::Apply(name, Box::new(arg)))
                } else {
                    Ok(RawTerm::Var(name))
                }
            }
            Some(Tok::Num(_)) => {
                let c = self.number()?;
                Ok(if c.is_zero() { RawTerm::Zero } else { RawTerm::Scale(c, Box::new(RawTerm::One)) })
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

pub fn parse_raw_term(src: &str) -> Result<RawTerm, TermError> {
    let toks = tokenize(src)?;
    let mut p = TermParser { toks, pos: 0, end: src.chars().count() + 1 };
    let t = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(t)
}

pub fn parse_term(src: &str, q: &Quiver, ctx: &Context, expected: Option<SortId>) -> Result<Term, TermError> {
    normalize_term(&parse_raw_term(src)?, q, ctx, expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_quiver;

    fn quiver() -> Quiver {
        parse_quiver(
            "sort A = homology X _ 0\nsort B = homology Y _ 0\nsort C = homology Z _ 0\n\
             edge functorial f : A -> B over f\nedge functorial g : B -> C over g\n\
             edge functorial h : A -> C over h\nedge functorial i : A -> A over id\ncompose g f = h\n",
        )
        .unwrap()
    }

    #[test]
    fn identities_and_composites_contract() {
        let q = quiver();
        let a = q.sort_by_name("A").unwrap();
        let ctx = Context::single("x", a);
        let t = parse_term("id(x)", &q, &ctx, None).unwrap();
        assert_eq!(t, Term::var(&ctx, 0));
        let t = parse_term("i(x)", &q, &ctx, None).unwrap();
        assert_eq!(t, Term::var(&ctx, 0));
        let gf = parse_term("g(f(x))", &q, &ctx, None).unwrap();
        let h = parse_term("h(x)", &q, &ctx, None).unwrap();
        assert_eq!(gf, h);
    }

    #[test]
    fn linear_cancellation() {
        let q = quiver();
        let ctx = Context::single("x", q.sort_by_name("A").unwrap());
        let t = parse_term("2*x + 3*x - 5*x", &q, &ctx, None).unwrap();
        assert!(t.is_zero());
        assert_eq!(t.display(&q), "0");
    }

    #[test]
    fn display_parses_back() {
        let q = quiver();
        let a = q.sort_by_name("A").unwrap();
        let ctx = Context::from_pairs([("x", a), ("y", a)]);
        let t = parse_term("2*g(f(x)) - 3/2*h(y) + h(x)", &q, &ctx, None).unwrap();
        let shown = t.display(&q);
        assert_eq!(shown, "3*h(x) - 3/2*h(y)");
        assert_eq!(parse_term(&shown, &q, &ctx, None).unwrap(), t);
    }

    #[test]
    fn sort_errors() {
        let q = quiver();
        let ctx = Context::single("x", q.sort_by_name("A").unwrap());
        assert!(matches!(parse_term("g(x)", &q, &ctx, None), Err(TermError::SortMismatch { .. })));
        assert!(matches!(parse_term("nope(x)", &q, &ctx, None), Err(TermError::UnknownSymbol(_))));
        assert!(matches!(parse_term("0", &q, &ctx, None), Err(TermError::CannotInfer(_))));
        assert!(matches!(parse_term("f(x", &q, &ctx, None), Err(TermError::Parse { .. })));
    }
}
