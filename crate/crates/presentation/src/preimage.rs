//! Adjoining a preimage of `b` along the first leg of a distinguished pair.

use quiver_core::{Context, Field, Matrix, Monomial, Quiver, SortId, Term, Q};
use sequent_engine::{Assignment, LinearModel, ModelHom, Theory};

use crate::build::{build_presented_model, PresentedModel};
use crate::present::{generated_submodel, kernel_generators, Presentation};
use crate::PresentationError;

/// `A` with the embedding of `H_b` and the adjoined element `a`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub pair: usize,
    /// Presentation of `A` on one variable `y` of the source sort of `f0`.
    pub presentation: Presentation,
    pub model: PresentedModel,
    /// `H_b -> A`.
    pub embedding: ModelHom,
    /// The class of `y`.
    pub canonical: Vec<Q>,
    /// Sort of `b`.
    pub sort: SortId,
}

impl Extension {
    /// The embedding is a homomorphism with full column rank everywhere.
    pub fn embeds(&self, q: &Quiver, hb: &LinearModel) -> bool {
        self.embedding.injective && self.embedding.is_natural(q, hb, &self.model.model)
    }

    /// `A(f0)(a)` equals the image of `b`, i.e. `1_{f0} - b` lies in the
    /// relations of the target sort.
    pub fn identifies(&self, q: &Quiver, b: &[Q]) -> bool {
        let (f0, _) = q.pairs()[self.pair];
        self.model.model.map(f0).mul_vec(&self.canonical) == self.embedding.maps[self.sort.0].mul_vec(b)
    }

    /// Relations of `a` in `A`, up to the presentation depth.
    pub fn relations_of_canonical(&self, q: &Quiver) -> Result<Vec<Term>, PresentationError> {
        let a = vec![self.canonical.clone()];
        kernel_generators(q, &self.presentation.context, self.presentation.depth, |_, m| {
            Some(self.model.model.eval_monomial(q, m, &a))
        })
    }

    /// Every relation of `a` holds at each preimage of `b` in `h`.
    pub fn uniform_on(&self, q: &Quiver, h: &LinearModel, preimages: &[Vec<Q>]) -> Result<bool, PresentationError> {
        let relations = self.relations_of_canonical(q)?;
        Ok(preimages.iter().all(|a| {
            let asg: Assignment = vec![a.clone()];
            relations.iter().all(|t| h.eval_term(q, t, &asg).iter().all(|x| x.is_zero()))
        }))
    }
}

/// Builds `A` from `H_b` and a pair `(f0, g0)` with `g0(b) = 0`: one variable
/// `y` over the source of `f0`, subject to every relation of `b` evaluated at
/// `f0(y)`.
pub fn extend_by_preimage(
    theory: &Theory,
    hb: &LinearModel,
    b: &[Q],
    pair: usize,
    depth: usize,
    rounds: usize,
) -> Result<Extension, PresentationError> {
    let q = theory.quiver();
    let (f0, g0) = q.pairs()[pair];
    let c0 = q.edge(f0).tgt;
    if b.len() != hb.dim(c0) {
        return Err(PresentationError::Context(format!("element of dimension {} in {}", b.len(), q.sort_name(c0))));
    }
    if hb.map(g0).mul_vec(b).iter().any(|x| !x.is_zero()) {
        return Err(PresentationError::NotInKernel);
    }
    let (sub, pb) = generated_submodel(q, hb, &[(c0, b.to_vec())], depth)?;
    if sub.model.dims() != hb.dims() {
        return Err(PresentationError::NotGenerated);
    }
    let ctx = Context::single("y", q.edge(f0).src);
    let fy = Term::var(&ctx, 0).apply(q, f0).expect("f0 starts at the variable's sort");
    let through = |t: &Term| t.substitute(q, &ctx, std::slice::from_ref(&fy));
    let presentation = Presentation::new(ctx.clone(), pb.generators.iter().map(through).collect(), Vec::new(), pb.depth + 1)?;
    let model = build_presented_model(theory, &presentation, rounds)?;
    let maps = q
        .sort_ids()
        .map(|s| {
            let cols: Vec<Vec<Q>> = sub.basis_terms[s.0]
                .iter()
                .map(|m: &Monomial| {
                    let g = Term::from_monomials(pb.context.clone(), s, [(m.clone(), Q::one())]);
                    model.class_of(q, &through(&g))
                })
                .collect();
            let images = Matrix::from_cols(&cols, model.model.dim(s));
            let inverse = sub.inclusion[s.0].inverse().expect("the submodel is everything");
            images.mul(&inverse)
        })
        .collect();
    let canonical = model.generators[0].clone();
    Ok(Extension { pair, presentation, model, embedding: ModelHom::new(maps), canonical, sort: c0 })
}
