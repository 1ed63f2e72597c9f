//! Base axioms generated from a quiver.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::quiver::{Composite, EdgeId, EdgeKind, Quiver, SortId};
use crate::scalar::{Field, Q};
use crate::sequent::AlgebraicSequent;
use crate::term::{normalize_path, Atom, Context, Monomial, Term};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomKind {
    Functoriality,
    Identity,
    BorderNaturality,
    Complex,
    Component,
    ZeroMap,
}

/// A linear relation `sum c_i * path_i = 0` between parallel paths.
///
/// Paths are stored as declared, before normalization, so that models can
/// check them edge by edge. `unit` relations are evaluated at `1` of `K0`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ArrowRelation {
    pub src: SortId,
    pub tgt: SortId,
    pub terms: Vec<(Q, Vec<EdgeId>)>,
}

#[derive(Clone, Debug)]
pub struct Axiom {
    pub kind: AxiomKind,
    pub label: String,
    /// The two sides as declared, for display.
    pub lhs: String,
    pub rhs: String,
    pub relation: ArrowRelation,
    /// Normalized form; one variable `x` of sort `relation.src`, or no variable
    /// for relations on the unit.
    pub sequent: AlgebraicSequent,
}

/// Representatives of distinct pointed components of a vertex; their values at
/// `1` are linearly independent. This is not an algebraic sequent.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct IndependenceAssertion {
    pub vertex: String,
    pub sort: SortId,
    pub representatives: Vec<EdgeId>,
}

#[derive(Clone, Debug, Default)]
pub struct BaseAxioms {
    pub axioms: Vec<Axiom>,
    pub independence: Vec<IndependenceAssertion>,
}

impl BaseAxioms {
    pub fn relations(&self) -> impl Iterator<Item = &ArrowRelation> {
        self.axioms.iter().map(|a| &a.relation)
    }

    pub fn of_kind(&self, kind: AxiomKind) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(move |a| a.kind == kind)
    }
}

fn path_display(q: &Quiver, var: &str, path: &[EdgeId]) -> String {
    let mut s = var.to_string();
    for e in path {
        s = format!("{}({})", q.edge_name(*e), s);
    }
    s
}

fn make_axiom(q: &Quiver, kind: AxiomKind, label: String, lhs: Vec<EdgeId>, rhs: Option<Vec<EdgeId>>, on_unit: bool) -> Axiom {
    let src = if on_unit { q.coefficient() } else { q.edge(lhs[0]).src };
    let tgt = lhs.last().map_or(src, |e| q.edge(*e).tgt);
    let var = if on_unit { "1" } else { "x" };
    let lhs_s = path_display(q, var, &lhs);
    let rhs_s = rhs.as_ref().map_or("0".to_string(), |p| path_display(q, var, p));
    let mut terms = vec![(Q::one(), lhs.clone())];
    if let Some(r) = &rhs {
        terms.push((Q::from_i64(-1), r.clone()));
    }
    let relation = ArrowRelation { src, tgt, terms };
    let (ctx, atom) = if on_unit { (Context::empty(), Atom::Unit) } else { (Context::single("x", src), Atom::Var(0)) };
    let term = relation_term(q, &relation, &ctx, atom);
    Axiom { kind, label, lhs: lhs_s, rhs: rhs_s, relation, sequent: AlgebraicSequent::equation(ctx, Vec::new(), term) }
}

/// The relation applied to `atom`, normalized.
pub fn relation_term(q: &Quiver, r: &ArrowRelation, ctx: &Context, atom: Atom) -> Term {
    Term::from_monomials(ctx.clone(), r.tgt, r.terms.iter().map(|(c, p)| (Monomial::new(atom, normalize_path(q, p)), c.clone())))
}

pub fn base_axioms(q: &Quiver) -> BaseAxioms {
    let mut out = BaseAxioms::default();
    for (&(g, f), &h) in q.compositions() {
        let rhs = match h {
            Composite::Edge(h) => vec![h],
            Composite::Identity => Vec::new(),
        };
        let label = format!("functoriality {} o {}", q.edge_name(g), q.edge_name(f));
        out.axioms.push(make_axiom(q, AxiomKind::Functoriality, label, vec![f, g], Some(rhs), false));
    }
    for e in q.edge_ids() {
        if q.edge(e).is_identity() {
            let label = format!("identity {}", q.edge_name(e));
            out.axioms.push(make_axiom(q, AxiomKind::Identity, label, vec![e], Some(Vec::new()), false));
        }
    }
    for (d, d2, e, e2) in border_squares(q) {
        let label =
            format!("border naturality {} {} over {} {}", q.edge_name(d), q.edge_name(d2), q.edge_name(e), q.edge_name(e2));
        out.axioms.push(make_axiom(q, AxiomKind::BorderNaturality, label, vec![e, d2], Some(vec![d, e2]), false));
    }
    for &(f, g) in q.pairs() {
        let label = format!("complex {} {}", q.edge_name(f), q.edge_name(g));
        out.axioms.push(make_axiom(q, AxiomKind::Complex, label, vec![f, g], None, false));
    }
    for e in q.edge_ids() {
        if q.edge(e).is_zero_map() {
            let label = format!("zero map {}", q.edge_name(e));
            out.axioms.push(make_axiom(q, AxiomKind::ZeroMap, label, vec![e], None, false));
        }
    }
    let mut by_component: BTreeMap<(String, String), Vec<EdgeId>> = BTreeMap::new();
    for p in q.points() {
        by_component.entry((p.vertex.clone(), p.component.clone())).or_default().push(p.edge);
    }
    for ((vertex, comp), edges) in &by_component {
        for w in edges.windows(2) {
            let label = format!("component {vertex}/{comp}: {} = {}", q.edge_name(w[0]), q.edge_name(w[1]));
            out.axioms.push(make_axiom(q, AxiomKind::Component, label, vec![w[0]], Some(vec![w[1]]), true));
        }
    }
    for (vertex, comps) in q.point_components() {
        let reps: Vec<EdgeId> = comps.iter().map(|c| by_component[&(vertex.clone(), c.clone())][0]).collect();
        let sort = q.edge(reps[0]).tgt;
        out.independence.push(IndependenceAssertion { vertex, sort, representatives: reps });
    }
    out
}

/// Squares `d' o e = e' o d` between boundary edges `d`, `d'` and functorial
/// edges `e`, `e'` over the same morphism label.
fn border_squares(q: &Quiver) -> Vec<(EdgeId, EdgeId, EdgeId, EdgeId)> {
    let label = |e: EdgeId| match &q.edge(e).kind {
        EdgeKind::Functorial { label } if label != "id" => Some(label.clone()),
        _ => None,
    };
    let boundaries: Vec<EdgeId> = q.edge_ids().filter(|&e| matches!(q.edge(e).kind, EdgeKind::Boundary)).collect();
    let mut out = Vec::new();
    for &d in &boundaries {
        for &d2 in &boundaries {
            let (s, t) = (q.edge(d).src, q.edge(d).tgt);
            let (s2, t2) = (q.edge(d2).src, q.edge(d2).tgt);
            for e in q.edges_from(s).filter(|&e| q.edge(e).tgt == s2) {
                let Some(l) = label(e) else { continue };
                for e2 in q.edges_from(t).filter(|&e2| q.edge(e2).tgt == t2) {
                    if label(e2).as_deref() == Some(l.as_str()) {
                        out.push((d, d2, e, e2));
                    }
                }
            }
        }
    }
    out
}
