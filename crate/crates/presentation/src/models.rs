//! The initial model and its variants over larger coefficient fields.

use quiver_core::{CoefficientField, Field, Matrix, Quiver, RatFunc, Q};
use sequent_engine::LinearModel;

/// `K0 = Q`, each pointed vertex `Q^d` with one coordinate per pointed
/// component, the point maps as basis vectors and the structure maps as sums;
/// everything else zero.
pub fn initial_model(q: &Quiver) -> LinearModel {
    generic_initial(q, Q::one())
}

fn generic_initial<F: Field>(q: &Quiver, one: F) -> LinearModel<F> {
    let components = q.point_components();
    let mut dims = vec![0; q.sorts().len()];
    dims[q.coefficient().0] = 1;
    for p in q.points() {
        dims[p.sort.0] = components[&p.vertex].len();
    }
    let mut maps: Vec<Matrix<F>> = q.edges().iter().map(|e| Matrix::zeros(dims[e.tgt.0], dims[e.src.0])).collect();
    for p in q.points() {
        let d = dims[p.sort.0];
        let i = components[&p.vertex].iter().position(|c| c == &p.component).expect("component is listed");
        let mut point = Matrix::zeros(d, 1);
        point.set(i, 0, one.clone());
        maps[p.edge.0] = point;
        maps[p.bang.0] = Matrix::from_rows(vec![vec![one.clone(); d]], d);
    }
    LinearModel::new(q, dims, maps).expect("initial model is well-shaped")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarModel {
    pub field: CoefficientField,
    pub model: LinearModel<RatFunc>,
    /// Finitely generated as a model iff the field is finitely generated.
    pub finitely_generated: bool,
}

impl ScalarModel {
    /// The inclusion of the rational initial model: identity blocks, checked
    /// against every edge.
    pub fn embedding_from_initial(&self, q: &Quiver) -> Option<Vec<Matrix<RatFunc>>> {
        let i = initial_model(q);
        let maps: Vec<Matrix<RatFunc>> = q.sort_ids().map(|s| Matrix::identity(i.dim(s))).collect();
        let lifted = |m: &Matrix<Q>| m.map(|x| self.field.constant(x));
        let natural = q.edge_ids().all(|e| {
            let edge = q.edge(e);
            maps[edge.tgt.0].mul(&lifted(i.map(e))) == self.model.map(e).mul(&maps[edge.src.0])
        });
        natural.then_some(maps)
    }
}

/// The initial model with `Q` replaced by the field `field`.
pub fn scalar_model(q: &Quiver, field: &CoefficientField) -> ScalarModel {
    ScalarModel { field: field.clone(), model: generic_initial(q, RatFunc::one()), finitely_generated: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use quiver_core::parse_quiver;

    fn points() -> Quiver {
        parse_quiver(include_str!("../../../data/points.qv")).unwrap()
    }

    #[test]
    fn pointed_components_give_coordinates() {
        let q = points();
        let m = initial_model(&q);
        assert_eq!(m.dim(q.sort_by_name("X0").unwrap()), 2);
        assert_eq!(m.dim(q.sort_by_name("Y0").unwrap()), 1);
        assert_eq!(m.dim(q.sort_by_name("XY1").unwrap()), 0);
        for p in q.points() {
            let round = m.map(p.bang).mul(m.map(p.edge));
            assert_eq!(round, Matrix::identity(1));
        }
        m.check_base(&q, &quiver_core::base_axioms(&q)).unwrap();
    }

    #[test]
    fn rational_scalar_model_is_the_initial_one() {
        let q = points();
        let k = scalar_model(&q, &CoefficientField::rationals());
        let i = initial_model(&q);
        assert_eq!(k.model.dims(), i.dims());
        for e in q.edge_ids() {
            assert_eq!(k.model.map(e).map(|x| x.as_constant().unwrap()), *i.map(e));
        }
    }

    #[test]
    fn transcendental_scalars_embed_the_initial_model() {
        let q = points();
        let k = scalar_model(&q, &CoefficientField::with_generators(["alpha"]));
        assert_eq!(k.field.transcendence_degree(), 1);
        let maps = k.embedding_from_initial(&q).unwrap();
        assert!(maps.iter().all(|m| m.is_injective()));
    }
}
