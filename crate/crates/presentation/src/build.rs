//! The model presented by `(S, U)`: monomials over the context modulo the
//! provable relations.

use quiver_core::{Field, Matrix, Monomial, Quiver, Subspace, Term, Q};
use sequent_engine::{Assignment, LinearModel, ModelHom, Theory};

use crate::{Presentation, PresentationError};

#[derive(Clone, Debug, PartialEq)]
pub struct PresentedModel {
    pub model: LinearModel,
    /// Per sort, the monomial whose class is each basis vector.
    pub basis: Vec<Vec<Monomial>>,
    /// Classes of the context variables.
    pub generators: Assignment,
}

impl PresentedModel {
    /// The class of a term over the presentation's context.
    pub fn class_of(&self, q: &Quiver, t: &Term) -> Vec<Q> {
        self.model.eval_term(q, t, &self.generators)
    }

    /// The map sending the generators to `assignment` in `target`; it is a
    /// homomorphism iff the relations hold there.
    pub fn hom_to(&self, q: &Quiver, target: &LinearModel, assignment: &Assignment) -> ModelHom {
        let maps = q
            .sort_ids()
            .map(|s| {
                let cols: Vec<Vec<Q>> = self.basis[s.0].iter().map(|m| target.eval_monomial(q, m, assignment)).collect();
                Matrix::from_cols(&cols, target.dim(s))
            })
            .collect();
        ModelHom::new(maps)
    }
}

/// Builds `A_(S,U)` over the rationals. Fails when the classes of the
/// fragment do not close under the edges within the presentation's depth.
pub fn build_presented_model(theory: &Theory, p: &Presentation, rounds: usize) -> Result<PresentedModel, PresentationError> {
    let q = theory.quiver();
    if p.independence.iter().any(|a| !a.terms.is_empty()) {
        return Err(PresentationError::NotRational);
    }
    let cl = p.closure(theory, 0, rounds);
    let u = &cl.universe;
    if u.truncated {
        return Err(PresentationError::Truncated { depth: p.depth });
    }
    let k0 = q.coefficient();
    let unit = u.vector(&Term::unit(q, &p.context)).expect("unit is in every universe");
    if cl.contains(k0, &unit) {
        return Err(PresentationError::Inconsistent);
    }
    // Per sort: chosen universe-local indices and their residuals.
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    let mut residuals: Vec<Vec<Vec<Q>>> = Vec::new();
    for s in q.sort_ids() {
        let n = u.sort_size(s);
        let mut span = Subspace::new(n);
        let (mut idx, mut res) = (Vec::new(), Vec::new());
        for i in 0..n {
            let mut e = vec![Q::zero(); n];
            e[i] = Q::one();
            let r = cl.spaces[s.0].reduce(&e);
            if span.insert(r.clone()) {
                idx.push(i);
                res.push(r);
            }
        }
        chosen.push(idx);
        residuals.push(res);
    }
    if chosen[k0.0].len() > 1 {
        return Err(PresentationError::NotRational);
    }
    let coords = |s: quiver_core::SortId, v: &[Q]| -> Vec<Q> {
        let r = cl.spaces[s.0].reduce(v);
        if residuals[s.0].is_empty() {
            return Vec::new();
        }
        Matrix::from_cols(&residuals[s.0], u.sort_size(s)).solve(&r).expect("classes span the quotient")
    };
    let local_vec = |s: quiver_core::SortId, local: usize| -> Vec<Q> {
        let mut e = vec![Q::zero(); u.sort_size(s)];
        e[local] = Q::one();
        e
    };
    let dims: Vec<usize> = chosen.iter().map(Vec::len).collect();
    let mut maps = Vec::with_capacity(q.edges().len());
    for e in q.edge_ids() {
        let edge = q.edge(e);
        let mut cols = Vec::with_capacity(dims[edge.src.0]);
        for &i in &chosen[edge.src.0] {
            let g = u.by_sort[edge.src.0][i];
            let Some(&(_, next)) = u.succ[g].iter().find(|(f, _)| *f == e) else {
                return Err(PresentationError::Truncated { depth: p.depth });
            };
            cols.push(coords(edge.tgt, &local_vec(edge.tgt, u.local[next])));
        }
        maps.push(Matrix::from_cols(&cols, dims[edge.tgt.0]));
    }
    let model = LinearModel::new(q, dims, maps)?;
    let basis = q.sort_ids().map(|s| chosen[s.0].iter().map(|&i| u.mono_local(s, i).clone()).collect()).collect();
    let generators = (0..p.context.len())
        .map(|i| {
            let x = Term::var(&p.context, i);
            coords(x.target(), &u.vector(&x).expect("variables are in every universe"))
        })
        .collect();
    Ok(PresentedModel { model, basis, generators })
}
