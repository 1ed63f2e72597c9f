//! Homomorphisms of representations: solutions of the naturality system with
//! `1` sent to `1`.

use quiver_core::{Field, Matrix, Quiver, Q};
use serde::Serialize;

use crate::model::LinearModel;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelHom {
    /// Per sort, a `dim target x dim source` matrix.
    pub maps: Vec<Matrix<Q>>,
    pub injective: bool,
}

impl ModelHom {
    pub fn new(maps: Vec<Matrix<Q>>) -> ModelHom {
        let injective = maps.iter().all(|m| m.is_injective());
        ModelHom { maps, injective }
    }

    pub fn is_natural(&self, q: &Quiver, src: &LinearModel, dst: &LinearModel) -> bool {
        q.edge_ids().all(|e| {
            let edge = q.edge(e);
            self.maps[edge.tgt.0].mul(src.map(e)) == dst.map(e).mul(&self.maps[edge.src.0])
        }) && preserves_unit(q, src, dst, &self.maps[q.coefficient().0])
    }

    pub fn compose(&self, first: &ModelHom) -> ModelHom {
        ModelHom::new(self.maps.iter().zip(&first.maps).map(|(a, b)| a.mul(b)).collect())
    }
}

fn preserves_unit(q: &Quiver, src: &LinearModel, dst: &LinearModel, phi: &Matrix<Q>) -> bool {
    src.dim(q.coefficient()) == 0 || dst.dim(q.coefficient()) == 0 || phi.mul_vec(&src.unit(q)) == dst.unit(q)
}

/// The affine space of homomorphisms `src -> dst`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub particular: Option<ModelHom>,
    /// Directions of the solution space (naturality with `1 -> 0`).
    pub directions: usize,
}

impl HomSpace {
    pub fn is_unique(&self) -> bool {
        self.particular.is_some() && self.directions == 0
    }

    pub fn exists(&self) -> bool {
        self.particular.is_some()
    }
}

struct Layout {
    offsets: Vec<usize>,
    total: usize,
}

fn layout(q: &Quiver, src: &LinearModel, dst: &LinearModel) -> Layout {
    let mut offsets = Vec::new();
    let mut total = 0;
    for s in q.sort_ids() {
        offsets.push(total);
        total += src.dim(s) * dst.dim(s);
    }
    Layout { offsets, total }
}

/// Builds the linear system `phi_t A = B phi_s` for every edge, plus `phi(1) = 1`.
fn system(q: &Quiver, src: &LinearModel, dst: &LinearModel) -> (Matrix<Q>, Vec<Q>, Layout) {
    let lay = layout(q, src, dst);
    let n = lay.total;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    // phi_s is dst(s) x src(s); entry (i, j) lives at offset + i * src(s) + j.
    let var = |s: usize, i: usize, j: usize| lay.offsets[s] + i * src.dims()[s] + j;
    for e in q.edge_ids() {
        let edge = q.edge(e);
        let (s, t) = (edge.src.0, edge.tgt.0);
        let a = src.map(e);
        let b = dst.map(e);
        // (phi_t A)[i][j] - (B phi_s)[i][j] = 0
        for i in 0..dst.dims()[t] {
            for j in 0..src.dims()[s] {
                let mut row = vec![Q::zero(); n];
                for k in 0..src.dims()[t] {
                    let x = a.get(k, j);
                    if !x.is_zero() {
                        let idx = var(t, i, k);
                        row[idx] = row[idx].plus(x);
                    }
                }
                for k in 0..dst.dims()[s] {
                    let x = b.get(i, k);
                    if !x.is_zero() {
                        let idx = var(s, k, j);
                        row[idx] = row[idx].minus(x);
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                    rhs.push(Q::zero());
                }
            }
        }
    }
    let k0 = q.coefficient().0;
    if src.dims()[k0] == 1 && dst.dims()[k0] == 1 {
        let mut row = vec![Q::zero(); n];
        row[var(k0, 0, 0)] = Q::one();
        rows.push(row);
        rhs.push(Q::one());
    }
    (Matrix::from_rows(rows, n), rhs, lay)
}

pub fn hom_space(q: &Quiver, src: &LinearModel, dst: &LinearModel) -> HomSpace {
    let (a, b, lay) = system(q, src, dst);
    let n = lay.total;
    let (solution, directions) = if a.rows() == 0 { (Some(vec![Q::zero(); n]), n) } else { (a.solve(&b), n - a.rank()) };
    let particular = solution.map(|x| {
        let maps = q
            .sort_ids()
            .map(|s| {
                let (r, c) = (dst.dim(s), src.dim(s));
                let o = lay.offsets[s.0];
                Matrix::from_vec(r, c, x[o..o + r * c].to_vec())
            })
            .collect();
        ModelHom::new(maps)
    });
    HomSpace { particular, directions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_exact_model, Dims};
    use quiver_core::parse_quiver;

    #[test]
    fn identity_is_the_unique_endomorphism_of_a_cyclic_model() {
        let q = parse_quiver("sort A = homology X _ 0\npoint X.x component c\n").unwrap();
        let m = random_exact_model(&q, &Dims::uniform(&q, 1), 2).unwrap();
        let h = hom_space(&q, &m, &m);
        assert!(h.is_unique());
        assert!(h.particular.unwrap().is_natural(&q, &m, &m));
    }

    #[test]
    fn homs_solve_naturality() {
        let q = parse_quiver(include_str!("../../../data/nori3.qv")).unwrap();
        let m = random_exact_model(&q, &Dims::uniform(&q, 2), 9).unwrap();
        let h = hom_space(&q, &m, &m);
        assert!(h.exists());
        assert!(h.particular.unwrap().is_natural(&q, &m, &m));
    }
}
