//! Finitely generated models through their presentations. An arrow `A -> B`
//! is a tuple of terms over the context of `B`, the images of the generators
//! of `A`; composition is substitution.

use std::sync::Arc;

use presentation::{generated_submodel, Membership, Presentation, DEFAULT_DEPTH};
use quiver_core::{AlgebraicSequent, Conclusion, Context, Field, Quiver, SortId, Term, Q};
use rand::Rng;
use sequent_engine::random::small_int;
use sequent_engine::{prove_in_i, random_exact_model, Budget, Dims, LinearModel, Theory, Verdict};
use serde_json::{json, Value};

use crate::category::{Amalgamation, Extension, FiniteStructureCategory, Problem, Span};

#[derive(Clone, Debug, PartialEq)]
pub struct TermTuple {
    pub context: Context,
    pub terms: Vec<Term>,
}

#[derive(Clone)]
pub struct Presentations {
    pub theory: Arc<Theory>,
    pub budget: Budget,
    /// Dimension bound of the exact models objects are sampled from.
    pub max_dim: usize,
}

impl Presentations {
    pub fn new(theory: Arc<Theory>, budget: Budget) -> Self {
        Presentations { theory, budget, max_dim: 3 }
    }

    fn quiver(&self) -> &Quiver {
        self.theory.quiver()
    }

    /// The amalgam presentation over `x1.. , y1..`: both relation sets and
    /// `w(x) = z(y)`.
    pub fn amalgam(&self, s: &Span<Self>) -> (Presentation, TermTuple, TermTuple) {
        let q = self.quiver();
        let names: Vec<(String, SortId)> =
            s.b.context
                .0
                .iter()
                .enumerate()
                .map(|(i, v)| (format!("x{}", i + 1), v.sort))
                .chain(s.c.context.0.iter().enumerate().map(|(i, v)| (format!("y{}", i + 1), v.sort)))
                .collect();
        let ctx = Context::from_pairs(names.iter().map(|(n, s)| (n.as_str(), *s)));
        let nb = s.b.context.len();
        let xs: Vec<Term> = (0..nb).map(|i| Term::var(&ctx, i)).collect();
        let ys: Vec<Term> = (0..s.c.context.len()).map(|i| Term::var(&ctx, nb + i)).collect();
        let mut gens: Vec<Term> = s.b.generators.iter().map(|t| t.substitute(q, &ctx, &xs)).collect();
        gens.extend(s.c.generators.iter().map(|t| t.substitute(q, &ctx, &ys)));
        for (w, z) in s.f.terms.iter().zip(&s.g.terms) {
            let glued = w.substitute(q, &ctx, &xs).sub(&z.substitute(q, &ctx, &ys));
            if !glued.is_zero() {
                gens.push(glued);
            }
        }
        let depth = s.b.depth.max(s.c.depth);
        let p = Presentation::new(ctx.clone(), gens, Vec::new(), depth).expect("terms live in the joint context");
        (p, TermTuple { context: ctx.clone(), terms: xs }, TermTuple { context: ctx, terms: ys })
    }

    fn random_element<R: Rng>(&self, m: &LinearModel, rng: &mut R) -> Option<(SortId, Vec<Q>)> {
        let q = self.quiver();
        let sorts: Vec<SortId> = q.sort_ids().filter(|&s| s != q.coefficient() && m.dim(s) > 0).collect();
        if sorts.is_empty() {
            return None;
        }
        let s = sorts[rng.gen_range(0..sorts.len())];
        loop {
            let v: Vec<Q> = (0..m.dim(s)).map(|_| small_int(rng)).collect();
            if v.iter().any(|x| !x.is_zero()) {
                return Some((s, v));
            }
        }
    }

    fn vanishes(&self, p: &Presentation, t: &Term) -> bool {
        t.is_zero()
            || p.generators.contains(t)
            || p.generators.contains(&t.neg())
            || matches!(p.membership(&self.theory, t, &self.budget), Ok(Membership::Member))
    }

    fn present(&self, m: &LinearModel, gens: &[(SortId, Vec<Q>)]) -> Presentation {
        generated_submodel(self.quiver(), m, gens, DEFAULT_DEPTH).expect("sampled models close within the default depth").1
    }
}

impl FiniteStructureCategory for Presentations {
    type Object = Presentation;
    type Arrow = TermTuple;

    fn name(&self) -> &'static str {
        "presentations"
    }

    fn initial(&self) -> Option<Presentation> {
        Some(Presentation::new(Context::empty(), Vec::new(), Vec::new(), DEFAULT_DEPTH).expect("empty context"))
    }

    fn from_initial(&self, a: &Presentation) -> Option<TermTuple> {
        Some(TermTuple { context: a.context.clone(), terms: Vec::new() })
    }

    fn identity(&self, a: &Presentation) -> TermTuple {
        TermTuple { context: a.context.clone(), terms: (0..a.context.len()).map(|i| Term::var(&a.context, i)).collect() }
    }

    fn compose(&self, f: &TermTuple, g: &TermTuple) -> TermTuple {
        let q = self.quiver();
        TermTuple { context: g.context.clone(), terms: f.terms.iter().map(|t| t.substitute(q, &g.context, &g.terms)).collect() }
    }

    /// Every relation of `src` holds at the tuple in `dst`.
    fn is_arrow(&self, f: &TermTuple, src: &Presentation, dst: &Presentation) -> bool {
        let q = self.quiver();
        if f.context != dst.context || f.terms.len() != src.context.len() {
            return false;
        }
        if f.terms.iter().zip(&src.context.0).any(|(t, v)| t.target() != v.sort) {
            return false;
        }
        src.generators.iter().all(|g| self.vanishes(dst, &g.substitute(q, &dst.context, &f.terms)))
    }

    /// Tuples agree modulo the relations of `dst`.
    fn same_arrow(&self, f: &TermTuple, g: &TermTuple, dst: &Presentation) -> bool {
        f.context == g.context
            && f.terms.len() == g.terms.len()
            && f.terms.iter().zip(&g.terms).all(|(a, b)| self.vanishes(dst, &a.sub(b)))
    }

    /// The presentation of one element of a sampled exact model.
    fn sample_object<R: Rng>(&self, rng: &mut R) -> Presentation {
        let q = self.quiver();
        loop {
            let m = random_exact_model(q, &Dims::uniform(q, self.max_dim), rng.gen()).expect("sampled dimensions are valid");
            if let Some(g) = self.random_element(&m, rng) {
                return self.present(&m, &[g]);
            }
        }
    }

    /// Adds one more element of the realizing model to the generators.
    fn sample_arrow_from<R: Rng>(&self, a: &Presentation, rng: &mut R) -> (Presentation, TermTuple) {
        let Some(r) = &a.realization else {
            return (a.clone(), self.identity(a));
        };
        let Some(extra) = self.random_element(&r.model, rng) else {
            return (a.clone(), self.identity(a));
        };
        let mut gens: Vec<(SortId, Vec<Q>)> = a.context.0.iter().map(|v| v.sort).zip(r.assignment.iter().cloned()).collect();
        gens.push(extra);
        let b = self.present(&r.model, &gens);
        let terms = (0..a.context.len()).map(|i| Term::var(&b.context, i)).collect();
        let f = TermTuple { context: b.context.clone(), terms };
        (b, f)
    }

    /// The presentation of one generator of `u`.
    fn sample_arrow_into<R: Rng>(&self, u: &Presentation, rng: &mut R) -> (Presentation, TermTuple) {
        match &u.realization {
            Some(r) if !u.context.is_empty() => {
                let i = rng.gen_range(0..u.context.len());
                let a = self.present(&r.model, &[(u.context.0[i].sort, r.assignment[i].clone())]);
                (a, TermTuple { context: u.context.clone(), terms: vec![Term::var(&u.context, i)] })
            }
            _ => {
                let a = self.initial().expect("registered");
                let f = self.from_initial(u).expect("registered");
                (a, f)
            }
        }
    }

    /// The amalgam exists unless its relations prove `⊥`; a model satisfying
    /// them is the certificate.
    fn amalgamate(&self, s: &Span<Self>) -> Amalgamation<Self> {
        let q = self.quiver();
        let (d, f2, g2) = self.amalgam(s);
        let bottom = AlgebraicSequent {
            context: d.context.clone(),
            premises: d.generators.clone(),
            diers: Vec::new(),
            conclusion: Conclusion::Bottom,
        };
        match prove_in_i(&self.theory, &bottom, &self.budget) {
            Ok(Verdict::Refuted(w)) => Amalgamation::Amalgamated { d, f2, g2, certificate: w.to_json() },
            Ok(Verdict::Proved(t)) => Amalgamation::Failed(json!({ "verdict": "proved", "trace": t.to_json(q) })),
            Ok(Verdict::Unknown(e)) => Amalgamation::Unknown(json!({ "verdict": "unknown", "exhausted": e })),
            Err(e) => Amalgamation::Unknown(json!({ "error": e.to_string() })),
        }
    }

    /// Homogeneity is a property of models; presentations do not decide it.
    fn extend(&self, _p: &Problem<Self>, _u: &Presentation) -> Extension<TermTuple> {
        Extension::Unknown(json!("extension problems are solved on models"))
    }

    fn object_json(&self, a: &Presentation) -> Value {
        let mut v = a.to_json(self.quiver());
        if let Some(o) = v.as_object_mut() {
            o.remove("realization");
        }
        v
    }

    fn arrow_json(&self, f: &TermTuple) -> Value {
        json!(f.terms.iter().map(|t| t.display(self.quiver())).collect::<Vec<_>>())
    }
}
