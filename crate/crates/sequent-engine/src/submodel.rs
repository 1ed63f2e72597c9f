//! Sub-representations generated by a few elements.

use std::collections::VecDeque;

use quiver_core::{Atom, Field, Matrix, Monomial, Quiver, SortId, Subspace, Q};

use crate::model::LinearModel;

#[derive(Clone, Debug)]
pub struct Submodel {
    pub model: LinearModel,
    /// Per sort, the columns are the chosen basis inside the ambient model.
    pub inclusion: Vec<Matrix<Q>>,
    /// Per sort, the monomial over the generators that produced each basis vector.
    pub basis_terms: Vec<Vec<Monomial>>,
}

impl Submodel {
    /// Coordinates of an ambient element lying in the submodel.
    pub fn coordinates(&self, s: SortId, v: &[Q]) -> Option<Vec<Q>> {
        let inc = &self.inclusion[s.0];
        if inc.cols() == 0 {
            return v.iter().all(|x| x.is_zero()).then(Vec::new);
        }
        inc.solve(v)
    }
}

/// The smallest sub-representation containing `1` (when the coefficient sort is
/// nonzero) and every generator.
pub fn generated_submodel(q: &Quiver, m: &LinearModel, gens: &[(SortId, Vec<Q>)]) -> Submodel {
    let n = q.sorts().len();
    let mut spaces: Vec<Subspace<Q>> = q.sort_ids().map(|s| Subspace::new(m.dim(s))).collect();
    let mut chosen: Vec<Vec<Vec<Q>>> = vec![Vec::new(); n];
    let mut terms: Vec<Vec<Monomial>> = vec![Vec::new(); n];
    let mut queue: VecDeque<(SortId, Vec<Q>, Monomial)> = VecDeque::new();
    let k0 = q.coefficient();
    if m.dim(k0) > 0 {
        queue.push_back((k0, m.unit(q), Monomial::new(Atom::Unit, Vec::new())));
    }
    for (i, (s, v)) in gens.iter().enumerate() {
        queue.push_back((*s, v.clone(), Monomial::new(Atom::Var(i), Vec::new())));
    }
    while let Some((s, v, mono)) = queue.pop_front() {
        if !spaces[s.0].insert(v.clone()) {
            continue;
        }
        for e in q.edges_from(s) {
            if q.edge(e).is_identity() {
                continue;
            }
            let w = m.map(e).mul_vec(&v);
            queue.push_back((q.edge(e).tgt, w, mono.then(q, &[e])));
        }
        chosen[s.0].push(v);
        terms[s.0].push(mono);
    }
    let inclusion: Vec<Matrix<Q>> = q.sort_ids().map(|s| Matrix::from_cols(&chosen[s.0], m.dim(s))).collect();
    let dims: Vec<usize> = chosen.iter().map(|c| c.len()).collect();
    let maps = q
        .edge_ids()
        .map(|e| {
            let edge = q.edge(e);
            let (src, tgt) = (edge.src.0, edge.tgt.0);
            let image = m.map(e).mul(&inclusion[src]);
            if dims[tgt] == 0 {
                return Matrix::zeros(0, dims[src]);
            }
            inclusion[tgt].solve_right(&image).expect("submodel is closed under edges")
        })
        .collect();
    let model = LinearModel::new(q, dims, maps).expect("restriction is well-shaped");
    Submodel { model, inclusion, basis_terms: terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_exact_model, Dims};
    use quiver_core::parse_quiver;

    #[test]
    fn full_basis_is_everything() {
        let q = parse_quiver(include_str!("../../../data/nori3.qv")).unwrap();
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), 5).unwrap();
        let mut gens = Vec::new();
        for s in q.sort_ids() {
            for i in 0..m.dim(s) {
                let mut v = vec![Q::zero(); m.dim(s)];
                v[i] = Q::one();
                gens.push((s, v));
            }
        }
        let sub = generated_submodel(&q, &m, &gens);
        assert_eq!(sub.model.dims(), m.dims());
    }

    #[test]
    fn no_generators_keeps_unit() {
        let q = parse_quiver("sort A = homology X _ 0\npoint X.x component c\n").unwrap();
        let m = random_exact_model(&q, &Dims::uniform(&q, 3), 1).unwrap();
        let sub = generated_submodel(&q, &m, &[]);
        assert_eq!(sub.model.dim(q.coefficient()), 1);
        assert_eq!(sub.model.dim(q.sort_by_name("A").unwrap()), 1);
    }
}
