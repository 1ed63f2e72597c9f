//! Sort- and edge-wise translation of terms along a partial signature map.

use crate::quiver::{EdgeId, Quiver, SortId};
use crate::term::{Context, Monomial, Term, Var};

/// A partial map of signatures, such as a degree shift.
pub trait SortTranslation {
    fn sort(&self, s: SortId) -> Option<SortId>;
    fn edge(&self, e: EdgeId) -> Option<EdgeId>;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("sort `{0}` has no translation")]
    Sort(String),
    #[error("edge `{0}` has no translation")]
    Edge(String),
}

pub fn translate_context(ctx: &Context, q: &Quiver, tr: &impl SortTranslation) -> Result<Context, TranslateError> {
    ctx.0
        .iter()
        .map(|v| {
            tr.sort(v.sort)
                .map(|s| Var { name: v.name.clone(), sort: s })
                .ok_or_else(|| TranslateError::Sort(q.sort_name(v.sort).into()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Context)
}

/// Applies the translation to the context, target and every edge of every path.
pub fn translate_term(t: &Term, q: &Quiver, tr: &impl SortTranslation) -> Result<Term, TranslateError> {
    let ctx = translate_context(t.context(), q, tr)?;
    let target = tr.sort(t.target()).ok_or_else(|| TranslateError::Sort(q.sort_name(t.target()).into()))?;
    let mut items = Vec::with_capacity(t.body().len());
    for (m, c) in t.body() {
        let path = m
            .path
            .iter()
            .map(|&e| tr.edge(e).ok_or_else(|| TranslateError::Edge(q.edge_name(e).into())))
            .collect::<Result<Vec<_>, _>>()?;
        let atom = m.atom;
        let mono = Monomial::new(atom, crate::term::normalize_path(q, &path));
        items.push((mono, c.clone()));
    }
    Ok(Term::from_monomials(ctx, target, items))
}
