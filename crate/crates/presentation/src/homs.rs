//! Pushing presentations along term tuples and enumerating the tuples that
//! define homomorphisms.

use quiver_core::{Context, DiersAtom, Monomial, Quiver, SortId, Term};
use rayon::prelude::*;
use sequent_engine::closure::{Closure, Universe};
use sequent_engine::saturate::UNIVERSE_CAP;
use sequent_engine::Theory;

use crate::build::build_presented_model;
use crate::present::{closing_depth, kernel_generators, Presentation, Realization};
use crate::PresentationError;

/// Most candidate tuples examined by one enumeration.
pub const HOM_TUPLE_CAP: usize = 20_000;

fn check_tuple(p: &Presentation, w: &[Term]) -> Result<(), PresentationError> {
    match w.iter().find(|t| t.context() != &p.context) {
        Some(t) => Err(PresentationError::Context(format!("{t:?}"))),
        None => Ok(()),
    }
}

fn tuple_context(w: &[Term]) -> Context {
    if w.len() == 1 {
        return Context::single("y", w[0].target());
    }
    let names: Vec<String> = (1..=w.len()).map(|i| format!("y{i}")).collect();
    Context::from_pairs(names.iter().map(String::as_str).zip(w.iter().map(Term::target)))
}

fn mono_term(ctx: &Context, q: &Quiver, s: SortId, m: &Monomial) -> Term {
    let _ = q;
    Term::from_monomials(ctx.clone(), s, [(m.clone(), quiver_core::Q::from_i64(1))])
}

/// `(T, V)` with `T = {t : t(w) ∈ S}`; `V` keeps the independence atoms whose
/// terms are reached through `w`.
pub fn pushforward(theory: &Theory, p: &Presentation, w: &[Term], rounds: usize) -> Result<Presentation, PresentationError> {
    let q = theory.quiver();
    check_tuple(p, w)?;
    let ctx = tuple_context(w);
    let mut depth = p.depth;
    let (generators, realization) = match &p.realization {
        Some(r) => {
            let assignment: Vec<_> = w.iter().map(|t| r.model.eval_term(q, t, &r.assignment)).collect();
            let gens: Vec<_> = w.iter().map(Term::target).zip(assignment.iter().cloned()).collect();
            depth = closing_depth(&sequent_engine::generated_submodel(q, &r.model, &gens), depth);
            let relations = kernel_generators(q, &ctx, depth, |_, m| Some(r.model.eval_monomial(q, m, &assignment)))?;
            (relations, Some(Realization { model: r.model.clone(), assignment }))
        }
        None => {
            let extra = w.iter().map(Term::depth).max().unwrap_or(0);
            let cl = p.closure(theory, extra, rounds);
            let gens = kernel_generators(q, &ctx, p.depth, |s, m| {
                let t = mono_term(&ctx, q, s, m).substitute(q, &p.context, w);
                cl.universe.vector(&t).map(|v| cl.spaces[s.0].reduce(&v))
            })?;
            (gens, None)
        }
    };
    let u = Universe::build(q, &ctx, depth, UNIVERSE_CAP);
    let k0 = q.coefficient();
    let independence = p
        .independence
        .iter()
        .map(|atom| DiersAtom {
            terms: (0..u.sort_size(k0))
                .map(|i| mono_term(&ctx, q, k0, u.mono_local(k0, i)))
                .filter(|t| atom.terms.contains(&t.substitute(q, &p.context, w)))
                .collect(),
        })
        .filter(|a| !a.terms.is_empty())
        .collect();
    Ok(Presentation { context: ctx, generators, independence, depth, realization })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomFilter {
    All,
    /// Only tuples whose homomorphism is injective on every sort.
    Injective,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomSet {
    /// One representative tuple per class, in enumeration order. Tuple `w`
    /// sends the generators of the target presentation's model to `w(x)`.
    pub tuples: Vec<Vec<Term>>,
    pub examined: usize,
    pub truncated: bool,
}

/// Decides membership in the source presentation.
struct SourceOracle<'a> {
    p: &'a Presentation,
    closure: Option<Closure>,
}

impl SourceOracle<'_> {
    fn member(&self, q: &Quiver, t: &Term) -> bool {
        self.p.quick_member(q, self.closure.as_ref(), t).unwrap_or(false)
    }
}

/// Tuples `w` over `src`'s context, one term per variable of `dst`, such
/// that every relation of `dst` holds at `w` in `src`. Each gives a
/// homomorphism from the model presented by `dst` to the one presented by
/// `src`. Candidate terms are `0` and single monomials of length at most
/// `depth`; tuples with provably equal components are merged.
pub fn hom_set(
    theory: &Theory,
    src: &Presentation,
    dst: &Presentation,
    depth: usize,
    filter: HomFilter,
    rounds: usize,
) -> Result<HomSet, PresentationError> {
    let q = theory.quiver();
    let u = Universe::build(q, &src.context, depth, UNIVERSE_CAP);
    let candidates: Vec<Vec<Term>> = dst
        .context
        .0
        .iter()
        .map(|v| {
            std::iter::once(Term::zero(src.context.clone(), v.sort))
                .chain((0..u.sort_size(v.sort)).map(|i| mono_term(&src.context, q, v.sort, u.mono_local(v.sort, i))))
                .collect()
        })
        .collect();
    let total = candidates.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len())).unwrap_or(usize::MAX);
    let examined = total.min(HOM_TUPLE_CAP);
    let gen_depth = dst.generators.iter().map(Term::depth).max().unwrap_or(0);
    let oracle =
        SourceOracle { p: src, closure: src.realization.is_none().then(|| src.closure(theory, depth + gen_depth, rounds)) };
    let tuple_at = |mut k: usize| -> Vec<Term> {
        let mut w = Vec::with_capacity(candidates.len());
        for c in candidates.iter().rev() {
            w.push(c[k % c.len()].clone());
            k /= c.len();
        }
        w.reverse();
        w
    };
    let accepted: Vec<Option<Vec<Term>>> = (0..examined)
        .into_par_iter()
        .map(|k| {
            let w = tuple_at(k);
            let ok = dst.generators.iter().all(|g| oracle.member(q, &g.substitute(q, &src.context, &w)))
                && dst.independence.iter().all(|a| {
                    a.terms.iter().all(|t| {
                        let image = t.substitute(q, &src.context, &w);
                        src.independence.iter().any(|b| b.terms.contains(&image))
                    })
                });
            ok.then_some(w)
        })
        .collect();
    let mut tuples: Vec<Vec<Term>> = Vec::new();
    for w in accepted.into_iter().flatten() {
        let same = |v: &Vec<Term>| v.iter().zip(&w).all(|(a, b)| oracle.member(q, &a.sub(b)));
        if !tuples.iter().any(same) {
            tuples.push(w);
        }
    }
    if filter == HomFilter::Injective {
        let a = build_presented_model(theory, src, rounds)?;
        let b = build_presented_model(theory, dst, rounds)?;
        tuples.retain(|w| {
            let images: Vec<_> = w.iter().map(|t| a.class_of(q, t)).collect();
            b.hom_to(q, &a.model, &images).injective
        });
    }
    Ok(HomSet { tuples, examined, truncated: examined < total })
}
