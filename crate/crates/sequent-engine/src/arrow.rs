//! Linear combinations of parallel paths, used as unary term operations.

use std::collections::BTreeMap;

use quiver_core::{normalize_path, Atom, Context, EdgeId, Field, Monomial, Quiver, SortId, Term, Q};
use serde::Serialize;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Arrow {
    pub src: SortId,
    pub tgt: SortId,
    /// Normalized path -> coefficient, no zero entries.
    pub terms: BTreeMap<Vec<EdgeId>, Q>,
}

impl Arrow {
    pub fn zero(src: SortId, tgt: SortId) -> Arrow {
        Arrow { src, tgt, terms: BTreeMap::new() }
    }

    pub fn identity(s: SortId) -> Arrow {
        Arrow::path(s, s, Vec::new())
    }

    /// A single path; `path` must already be normalized.
    pub fn path(src: SortId, tgt: SortId, path: Vec<EdgeId>) -> Arrow {
        let mut terms = BTreeMap::new();
        terms.insert(path, Q::one());
        Arrow { src, tgt, terms }
    }

    pub fn edge(q: &Quiver, e: EdgeId) -> Arrow {
        let edge = q.edge(e);
        Arrow::path(edge.src, edge.tgt, normalize_path(q, &[e]))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest path.
    pub fn len(&self) -> usize {
        self.terms.keys().map(|p| p.len()).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    fn add_path(&mut self, p: Vec<EdgeId>, c: Q) {
        if c.is_zero() {
            return;
        }
        let vanished = {
            let slot = self.terms.entry(p.clone()).or_insert_with(Q::zero);
            *slot = slot.plus(&c);
            slot.is_zero()
        };
        if vanished {
            self.terms.remove(&p);
        }
    }

    pub fn add(&self, o: &Arrow) -> Arrow {
        debug_assert_eq!((self.src, self.tgt), (o.src, o.tgt));
        let mut out = self.clone();
        for (p, c) in &o.terms {
            out.add_path(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Arrow {
        if c.is_zero() {
            return Arrow::zero(self.src, self.tgt);
        }
        Arrow { src: self.src, tgt: self.tgt, terms: self.terms.iter().map(|(p, x)| (p.clone(), x.times(c))).collect() }
    }

    pub fn sub(&self, o: &Arrow) -> Arrow {
        self.add(&o.scale(&Q::from_i64(-1)))
    }

    /// `next o self`.
    pub fn then(&self, q: &Quiver, next: &Arrow) -> Arrow {
        debug_assert_eq!(self.tgt, next.src);
        let mut out = Arrow::zero(self.src, next.tgt);
        for (p1, c1) in &self.terms {
            for (p2, c2) in &next.terms {
                let mut p = p1.clone();
                p.extend_from_slice(p2);
                out.add_path(normalize_path(q, &p), c1.times(c2));
            }
        }
        out
    }

    /// The monomials of `self` applied to `m`, with coefficients.
    pub fn after_monomial<'a>(&'a self, q: &'a Quiver, m: &'a Monomial) -> impl Iterator<Item = (Monomial, Q)> + 'a {
        self.terms.iter().map(move |(p, c)| (m.then(q, p), c.clone()))
    }

    /// `self(t)`.
    pub fn apply(&self, q: &Quiver, t: &Term) -> Term {
        debug_assert_eq!(t.target(), self.src);
        let items = t
            .body()
            .iter()
            .flat_map(|(m, c)| self.after_monomial(q, m).map(move |(m2, c2)| (m2, c.times(&c2))))
            .collect::<Vec<_>>();
        Term::from_monomials(t.context().clone(), self.tgt, items)
    }

    /// Applied to a fresh variable `var`.
    pub fn display(&self, q: &Quiver, var: &str) -> String {
        let ctx = Context::single(var, self.src);
        self.apply(q, &Term::var(&ctx, 0)).display(q)
    }

    /// Reads a single-variable term without unit monomials as an arrow.
    pub fn from_term(t: &Term) -> Option<Arrow> {
        if t.context().len() != 1 {
            return None;
        }
        let mut out = Arrow::zero(t.context().sort(0), t.target());
        for (m, c) in t.body() {
            if m.atom != Atom::Var(0) {
                return None;
            }
            out.add_path(m.path.clone(), c.clone());
        }
        Some(out)
    }
}

/// All normalized paths of length `1..=max_len` out of `src`, without identity
/// edges, deduplicated, in order of discovery.
pub fn paths_from(q: &Quiver, src: SortId, max_len: usize) -> Vec<(SortId, Vec<EdgeId>)> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<EdgeId>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for raw in &frontier {
            let here = raw.last().map_or(src, |e| q.edge(*e).tgt);
            for e in q.edges_from(here) {
                if q.edge(e).is_identity() {
                    continue;
                }
                let mut r = raw.clone();
                r.push(e);
                let p = normalize_path(q, &r);
                if !p.is_empty() && seen.insert(p.clone()) {
                    let tgt = q.edge(*p.last().expect("nonempty")).tgt;
                    out.push((tgt, p));
                }
                next.push(r);
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use quiver_core::parse_quiver;

    #[test]
    fn composition_normalizes() {
        let q = parse_quiver(include_str!("../../../data/nori3.qv")).unwrap();
        let a1 = Arrow::edge(&q, q.edge_by_name("a1").unwrap());
        let b1 = Arrow::edge(&q, q.edge_by_name("b1").unwrap());
        let c1 = Arrow::edge(&q, q.edge_by_name("c1").unwrap());
        assert_eq!(a1.then(&q, &b1), c1);
        assert!(a1.then(&q, &b1).sub(&c1).is_zero());
    }
}
