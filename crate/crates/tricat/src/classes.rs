//! Classes of unary arrows modulo the equations of one level.

use std::collections::BTreeMap;

use quiver_core::{Field, Quiver, SortId};
use rayon::prelude::*;
use sequent_engine::arrow::paths_from;
use sequent_engine::{Arrow, Theory};
use serde::Serialize;

use crate::state::TriCatState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    /// Contains the identity.
    Identity,
    /// Contains a provably vanishing path but not the identity.
    Zero,
    Path,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermClass {
    pub src: SortId,
    pub tgt: SortId,
    /// First member in enumeration order: shortest, then by discovery.
    pub rep: Arrow,
    pub key: String,
    pub kind: ClassKind,
    /// The class is the zero arrow.
    pub vanishing: bool,
    /// Enumerated paths in the class.
    pub members: usize,
}

/// `g∘f` style name of an arrow; zero and identities carry their sorts.
pub fn show_arrow(q: &Quiver, a: &Arrow) -> String {
    if a.is_zero() {
        return format!("0:{}→{}", q.sort_name(a.src), q.sort_name(a.tgt));
    }
    let parts: Vec<String> = a
        .terms
        .iter()
        .map(|(p, c)| {
            let body = if p.is_empty() {
                format!("id:{}", q.sort_name(a.src))
            } else {
                p.iter().rev().map(|&e| q.edge_name(e)).collect::<Vec<_>>().join("∘")
            };
            if c.is_one() {
                body
            } else if c.negated().is_one() {
                format!("-{body}")
            } else {
                format!("{c}·{body}")
            }
        })
        .collect();
    parts.join(" + ")
}

/// Partitions the paths of length at most `depth` out of each sort.
pub(crate) fn classes_over(q: &Quiver, theory: &Theory, sorts: &[SortId], depth: usize) -> Vec<TermClass> {
    sorts.par_iter().map(|&s| classes_from(q, theory, s, depth)).collect::<Vec<_>>().concat()
}

fn classes_from(q: &Quiver, theory: &Theory, s: SortId, depth: usize) -> Vec<TermClass> {
    let mut candidates = vec![Arrow::identity(s)];
    candidates.extend(paths_from(q, s, depth).into_iter().map(|(t, p)| Arrow::path(s, t, p)));
    let mut by_tgt: BTreeMap<SortId, Vec<TermClass>> = BTreeMap::new();
    for a in candidates {
        let identity = a.src == a.tgt && a.terms.keys().all(|p| p.is_empty());
        let vanishing = theory.vanishes(&a);
        let list = by_tgt.entry(a.tgt).or_default();
        let hit = if vanishing {
            list.iter_mut().find(|c| c.vanishing)
        } else {
            list.iter_mut().find(|c| !c.vanishing && theory.vanishes(&a.sub(&c.rep)))
        };
        match hit {
            Some(c) => c.members += 1,
            None => {
                let (kind, key) = if identity {
                    (ClassKind::Identity, format!("id:{}", q.sort_name(s)))
                } else if vanishing {
                    (ClassKind::Zero, show_arrow(q, &Arrow::zero(a.src, a.tgt)))
                } else {
                    (ClassKind::Path, show_arrow(q, &a))
                };
                let rep = if vanishing && !identity { Arrow::zero(a.src, a.tgt) } else { a.clone() };
                list.push(TermClass { src: a.src, tgt: a.tgt, rep, key, kind, vanishing, members: 1 });
            }
        }
    }
    by_tgt.into_values().flatten().collect()
}

/// Class representatives of all arrows of length at most `depth` over the
/// signature of `level`, in a stable order: by source, target, then
/// discovery.
pub fn term_classes(state: &TriCatState, level: usize, depth: usize) -> Vec<TermClass> {
    let q = state.quiver(level);
    let sorts: Vec<SortId> = state.sorts_at(level).collect();
    classes_over(&q, &state.theory(level), &sorts, depth)
}
