//! Finite-dimensional representations of a quiver over an exact field.

use quiver_core::linalg::span_dim;
use quiver_core::{ArrowRelation, Atom, BaseAxioms, EdgeId, Field, Matrix, Monomial, Quiver, SortId, Term, Q};
use serde::{Deserialize, Serialize};

/// One vector per context variable.
pub type Assignment<F = Q> = Vec<Vec<F>>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("expected {expected} sorts and {edges} edges, found {found_sorts} and {found_edges}")]
    Arity { expected: usize, edges: usize, found_sorts: usize, found_edges: usize },
    #[error("matrix of `{edge}` is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    Shape { edge: String, rows: usize, cols: usize, want_rows: usize, want_cols: usize },
    #[error("the coefficient sort must have dimension 0 or 1, found {0}")]
    Coefficient(usize),
    #[error("relation fails: {0}")]
    Relation(String),
    #[error("component representatives of `{0}` are dependent")]
    Independence(String),
    #[error("assignment does not match the context sorts")]
    Assignment,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel<F: Field = Q> {
    dims: Vec<usize>,
    maps: Vec<Matrix<F>>,
    /// Per distinguished pair: image of the first leg equals kernel of the second.
    exact: Vec<bool>,
}

impl<F: Field> LinearModel<F> {
    pub fn new(q: &Quiver, dims: Vec<usize>, maps: Vec<Matrix<F>>) -> Result<Self, ModelError> {
        if dims.len() != q.sorts().len() || maps.len() != q.edges().len() {
            return Err(ModelError::Arity {
                expected: q.sorts().len(),
                edges: q.edges().len(),
                found_sorts: dims.len(),
                found_edges: maps.len(),
            });
        }
        if dims[q.coefficient().0] > 1 {
            return Err(ModelError::Coefficient(dims[q.coefficient().0]));
        }
        for (e, m) in q.edge_ids().zip(&maps) {
            let edge = q.edge(e);
            let (r, c) = (dims[edge.tgt.0], dims[edge.src.0]);
            if m.rows() != r || m.cols() != c {
                return Err(ModelError::Shape {
                    edge: edge.name.clone(),
                    rows: m.rows(),
                    cols: m.cols(),
                    want_rows: r,
                    want_cols: c,
                });
            }
        }
        let mut model = LinearModel { dims, maps, exact: Vec::new() };
        model.exact = (0..q.pairs().len()).map(|i| model.pair_exact(q, i)).collect();
        Ok(model)
    }

    /// Everything zero, including the coefficient sort.
    pub fn zero(q: &Quiver) -> Self {
        let dims = vec![0; q.sorts().len()];
        let maps = q.edges().iter().map(|_| Matrix::zeros(0, 0)).collect();
        LinearModel::new(q, dims, maps).expect("zero model is well-shaped")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, s: SortId) -> usize {
        self.dims[s.0]
    }

    pub fn map(&self, e: EdgeId) -> &Matrix<F> {
        &self.maps[e.0]
    }

    pub fn maps(&self) -> &[Matrix<F>] {
        &self.maps
    }

    pub fn exact_flags(&self) -> &[bool] {
        &self.exact
    }

    pub fn is_exact(&self) -> bool {
        self.exact.iter().all(|&b| b)
    }

    /// The element `1` of the coefficient sort (empty in the zero model).
    pub fn unit(&self, q: &Quiver) -> Vec<F> {
        vec![F::one(); self.dims[q.coefficient().0]]
    }

    pub fn path_matrix(&self, q: &Quiver, src: SortId, path: &[EdgeId]) -> Matrix<F> {
        let mut m = Matrix::identity(self.dims[src.0]);
        for &e in path {
            m = self.maps[e.0].mul(&m);
        }
        debug_assert!(path.last().is_none_or(|e| q.edge(*e).tgt.0 < self.dims.len()));
        m
    }

    pub fn apply_path(&self, path: &[EdgeId], v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for &e in path {
            v = self.maps[e.0].mul_vec(&v);
        }
        v
    }

    pub fn eval_monomial(&self, q: &Quiver, m: &Monomial, assignment: &Assignment<F>) -> Vec<F> {
        let start = match m.atom {
            Atom::Unit => self.unit(q),
            Atom::Var(i) => assignment[i].clone(),
        };
        self.apply_path(&m.path, &start)
    }

    pub fn eval_term(&self, q: &Quiver, t: &Term, assignment: &Assignment<F>) -> Vec<F> {
        let mut acc = vec![F::zero(); self.dims[t.target().0]];
        for (m, c) in t.body() {
            let v = self.eval_monomial(q, m, assignment);
            let c = F::from_q(c);
            for (a, x) in acc.iter_mut().zip(&v) {
                *a = a.plus(&c.times(x));
            }
        }
        acc
    }

    pub fn check_assignment(&self, t: &quiver_core::Context, a: &Assignment<F>) -> Result<(), ModelError> {
        if a.len() != t.len() || t.0.iter().zip(a).any(|(v, x)| x.len() != self.dims[v.sort.0]) {
            return Err(ModelError::Assignment);
        }
        Ok(())
    }

    pub fn relation_holds(&self, q: &Quiver, r: &ArrowRelation) -> bool {
        let mut acc = Matrix::zeros(self.dims[r.tgt.0], self.dims[r.src.0]);
        for (c, p) in &r.terms {
            acc = acc.add(&self.path_matrix(q, r.src, p).scale(&F::from_q(c)));
        }
        acc.is_zero()
    }

    pub fn pair_exact(&self, q: &Quiver, i: usize) -> bool {
        let (f, g) = q.pairs()[i];
        let mf = &self.maps[f.0];
        let mg = &self.maps[g.0];
        if !mg.mul(mf).is_zero() {
            return false;
        }
        mf.rank() + mg.rank() == self.dims[q.edge(f).tgt.0]
    }

    /// All base relations and independence assertions.
    pub fn check_base(&self, q: &Quiver, ax: &BaseAxioms) -> Result<(), ModelError> {
        for a in &ax.axioms {
            if !self.relation_holds(q, &a.relation) {
                return Err(ModelError::Relation(a.label.clone()));
            }
        }
        if self.dims[q.coefficient().0] == 0 {
            return Ok(());
        }
        for ind in &ax.independence {
            let unit = self.unit(q);
            let vs: Vec<Vec<F>> = ind.representatives.iter().map(|e| self.maps[e.0].mul_vec(&unit)).collect();
            if span_dim(&vs, self.dims[ind.sort.0]) < vs.len() {
                return Err(ModelError::Independence(ind.vertex.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    dims: Vec<usize>,
    maps: Vec<Matrix<Q>>,
    exact: Vec<bool>,
}

impl LinearModel<Q> {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelJson { dims: self.dims.clone(), maps: self.maps.clone(), exact: self.exact.clone() })
            .expect("model serializes")
    }

    pub fn from_json_value(q: &Quiver, v: serde_json::Value) -> Result<Self, String> {
        let j: ModelJson = serde_json::from_value(v).map_err(|e| e.to_string())?;
        LinearModel::new(q, j.dims, j.maps).map_err(|e| e.to_string())
    }
}

impl Serialize for LinearModel<Q> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModelJson { dims: self.dims.clone(), maps: self.maps.clone(), exact: self.exact.clone() }.serialize(s)
    }
}
