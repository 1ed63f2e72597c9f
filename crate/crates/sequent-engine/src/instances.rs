//! Generators of test goals: instances of the exactness schemes and random
//! single-variable sequents.

use quiver_core::{AlgebraicSequent, Context, EdgeId, Quiver, SortId, Term, Q};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::arrow::{paths_from, Arrow};
use crate::theory::{RuleKind, Theory};

#[derive(Clone, Debug)]
pub struct SchemeInstance {
    pub scheme: &'static str,
    pub sequent: AlgebraicSequent,
}

fn sequent_of(src: SortId, premises: &[Arrow], conclusion: &Arrow, q: &Quiver) -> AlgebraicSequent {
    let ctx = Context::single("x", src);
    let x = Term::var(&ctx, 0);
    AlgebraicSequent::equation(ctx, premises.iter().map(|a| a.apply(q, &x)).collect(), conclusion.apply(q, &x))
}

/// Instances of the three schemes whose terms have depth at most `term_depth`.
///
/// The first scheme is generated from pairs of paths with equal composite,
/// the other two from the theory's rule tables.
pub fn scheme_instances(theory: &Theory, term_depth: usize) -> Vec<SchemeInstance> {
    let q = theory.quiver();
    let mut out = Vec::new();
    for &(f, g) in q.pairs() {
        let d = q.edge(f).tgt;
        let fa = Arrow::edge(q, f);
        let ga = Arrow::edge(q, g);
        let mut arrows = vec![Arrow::identity(d)];
        arrows.extend(paths_from(q, d, term_depth).into_iter().map(|(t, p)| Arrow::path(d, t, p)));
        for (i, s1) in arrows.iter().enumerate() {
            for s2 in &arrows[i + 1..] {
                if s1.tgt == s2.tgt && theory.vanishes(&fa.then(q, s1).sub(&fa.then(q, s2))) {
                    out.push(SchemeInstance { scheme: "E1", sequent: sequent_of(d, std::slice::from_ref(&ga), &s1.sub(s2), q) });
                }
            }
        }
    }
    let rules = theory.rules(term_depth);
    for r in &rules.rules {
        let scheme = match r.kind {
            RuleKind::E2 { .. } => "E2",
            RuleKind::E3 { .. } => "E3",
            _ => continue,
        };
        if r.premises.iter().chain([&r.conclusion]).any(|a| a.len() > term_depth) {
            continue;
        }
        out.push(SchemeInstance { scheme, sequent: sequent_of(r.src, &r.premises, &r.conclusion, q) });
    }
    out
}

/// The exactness-shaped probe `g(x) = 0 |- x = 0` for a distinguished pair.
/// It holds in substructures only where the kernel of `g` vanishes.
pub fn kernel_probe(q: &Quiver, pair: usize) -> AlgebraicSequent {
    let (f, g) = q.pairs()[pair];
    let d = q.edge(f).tgt;
    let ga = Arrow::edge(q, g);
    sequent_of(d, &[ga], &Arrow::identity(d), q)
}

fn random_arrow<R: Rng>(rng: &mut R, src: SortId, paths: &[(SortId, Vec<EdgeId>)]) -> Arrow {
    let (t, p) = paths.choose(rng).expect("identity is always present").clone();
    let mut a = Arrow::path(src, t, p);
    let same: Vec<_> = paths.iter().filter(|(t2, _)| *t2 == t).collect();
    if same.len() > 1 && rng.gen_bool(0.4) {
        let (_, p2) = same.choose(rng).expect("nonempty");
        let c = Q::from_i64(rng.gen_range(-2..=2i64));
        a = a.add(&Arrow::path(src, t, p2.clone()).scale(&c));
    }
    a
}

/// A random single-variable sequent with path combinations of length at most
/// `max_len`.
pub fn random_sequent<R: Rng>(q: &Quiver, rng: &mut R, max_len: usize) -> AlgebraicSequent {
    let sorts: Vec<SortId> = q.sort_ids().filter(|&s| s != q.coefficient() && q.edges_from(s).next().is_some()).collect();
    let src = *sorts.choose(rng).unwrap_or(&q.coefficient());
    let paths: Vec<(SortId, Vec<EdgeId>)> = std::iter::once((src, Vec::new())).chain(paths_from(q, src, max_len)).collect();
    let n_prem = rng.gen_range(0..=2);
    let premises: Vec<Arrow> = (0..n_prem).map(|_| random_arrow(rng, src, &paths)).collect();
    let conclusion = random_arrow(rng, src, &paths);
    sequent_of(src, &premises, &conclusion, q)
}
