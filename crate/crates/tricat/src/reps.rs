//! Matrix representations in which every cone is an actual mapping cone.
//!
//! Schemes get random dimensions and morphisms random matrices, the same in
//! every degree, so `T1` acts as the identity. A cone of `t: A -> B` is
//! `coker t ⊕ ker t`; `π_t` is the quotient map into the first summand and
//! `δ_t` the inclusion of the second into `A`. Fillers act by the maps their
//! squares induce on cokernels and kernels.

use std::collections::BTreeMap;

use quiver_core::{Matrix, SortKind, Q};
use rand::Rng;
use sequent_engine::{task_rng, Arrow};
use serde::Serialize;

use crate::state::{Symbol, TriCatState};

#[derive(Clone, Debug, PartialEq)]
pub struct ConeRepresentation {
    pub dims: Vec<usize>,
    pub maps: Vec<Matrix<Q>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RepresentationCheck {
    pub relations: usize,
    /// Of which `g∘f = 0` equations of the quotient.
    pub tprime: usize,
    pub satisfied: usize,
    pub failures: Vec<String>,
    /// `ker π_t = im t` for every cone.
    pub kernels_match: bool,
}

impl RepresentationCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.kernels_match
    }
}

struct ConeData {
    t: Matrix<Q>,
    /// Rows span the left kernel of `t`.
    quotient: Matrix<Q>,
    section: Matrix<Q>,
    /// Columns span the kernel of `t`.
    kernel: Matrix<Q>,
    retraction: Matrix<Q>,
}

impl ConeRepresentation {
    pub fn eval(&self, a: &Arrow) -> Matrix<Q> {
        let (n, m) = (self.dims[a.src.0], self.dims[a.tgt.0]);
        let mut out = Matrix::zeros(m, n);
        for (p, c) in &a.terms {
            let mut x = Matrix::identity(n);
            for e in p {
                x = self.maps[e.0].mul(&x);
            }
            out = out.add(&x.scale(c));
        }
        out
    }

    /// Every relation of the state, then `ker π_t = im t` per cone.
    pub fn check(&self, state: &TriCatState) -> RepresentationCheck {
        let mut report = RepresentationCheck { kernels_match: true, ..RepresentationCheck::default() };
        for r in state.relations() {
            report.relations += 1;
            report.tprime += usize::from(r.tprime);
            if self.eval(&r.relation.arrow).is_zero() {
                report.satisfied += 1;
            } else {
                report.failures.push(r.relation.label.clone());
            }
        }
        for cone in &state.cones {
            let t = self.eval(&cone.class.rep);
            let pi = &self.maps[cone.pi.0];
            let dim_b = self.dims[cone.class.tgt.0];
            if !pi.mul(&t).is_zero() || dim_b - pi.rank() != t.rank() {
                report.kernels_match = false;
            }
        }
        report
    }
}

fn block_diag(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    let top = a.hstack(&Matrix::zeros(a.rows(), b.cols()));
    let bottom = Matrix::zeros(b.rows(), a.cols()).hstack(b);
    top.vstack(&bottom)
}

fn cone_data(t: Matrix<Q>) -> ConeData {
    let (b, a) = (t.rows(), t.cols());
    let quotient = Matrix::from_rows(t.left_kernel(), b);
    let section = quotient.solve_right(&Matrix::identity(quotient.rows())).expect("full row rank");
    let kernel = Matrix::from_cols(&t.kernel(), a);
    let retraction = kernel.solve_left(&Matrix::identity(kernel.cols())).expect("full column rank");
    ConeData { t, quotient, section, kernel, retraction }
}

/// A representation of the whole state with scheme dimensions in
/// `1..=max_dim` and morphism entries in `-2..=2`.
pub fn mapping_cone_representation(state: &TriCatState, seed: u64, max_dim: usize) -> ConeRepresentation {
    let mut rng = task_rng(seed, 0);
    let scheme_dims: BTreeMap<&str, usize> =
        state.input.schemes.iter().map(|s| (s.as_str(), rng.gen_range(1..=max_dim.max(1)))).collect();
    let morphisms: BTreeMap<&str, Matrix<Q>> = state
        .input
        .morphisms
        .iter()
        .map(|m| {
            let (r, c) = (scheme_dims[m.tgt.as_str()], scheme_dims[m.src.as_str()]);
            let data = (0..r * c).map(|_| Q::from_i64(rng.gen_range(-2..=2))).collect();
            (m.name.as_str(), Matrix::from_vec(r, c, data))
        })
        .collect();
    let sorts = state.sort_decls();
    let edges = state.edge_decls();
    let mut rep = ConeRepresentation { dims: vec![0; sorts.len()], maps: vec![Matrix::zeros(0, 0); edges.len()] };
    let mut cones: Vec<Option<ConeData>> = (0..state.cones.len()).map(|_| None).collect();
    for level in 0..=state.level() {
        for (c, cone) in state.cones.iter().enumerate().filter(|(_, c)| c.level == level) {
            let data = cone_data(rep.eval(&cone.class.rep));
            rep.dims[cone.sort.0] = data.quotient.rows() + data.kernel.cols();
            cones[c] = Some(data);
        }
        for (i, s) in sorts.iter().enumerate().filter(|(_, s)| s.level == level) {
            rep.dims[i] = match &s.kind {
                SortKind::Coefficient => 1,
                SortKind::Graded { vertex, .. } => scheme_dims[vertex.as_str()],
                SortKind::Cone { .. } => rep.dims[i],
                _ => 0,
            };
        }
        for (i, e) in edges.iter().enumerate().filter(|(_, e)| e.level == level) {
            let (n, m) = (rep.dims[e.src.0], rep.dims[e.tgt.0]);
            rep.maps[i] = match &e.symbol {
                Symbol::Shift { morphism, .. } => morphisms[morphism.as_str()].clone(),
                Symbol::Zero => Matrix::zeros(m, n),
                Symbol::Projection { cone } => {
                    let d = cones[*cone].as_ref().expect("cone built");
                    d.quotient.vstack(&Matrix::zeros(d.kernel.cols(), d.t.rows()))
                }
                Symbol::Connecting { cone } => {
                    let d = cones[*cone].as_ref().expect("cone built");
                    Matrix::zeros(d.t.cols(), d.quotient.rows()).hstack(&d.kernel)
                }
                Symbol::Filler { square } => {
                    let sq = &state.squares[*square];
                    let (d, d2) = (cones[sq.t].as_ref().expect("cone built"), cones[sq.t2].as_ref().expect("cone built"));
                    let (w, z) = (rep.eval(&sq.w.rep), rep.eval(&sq.z.rep));
                    let on_cokernels = d2.quotient.mul(&z).mul(&d.section);
                    let on_kernels = d2.retraction.mul(&w).mul(&d.kernel);
                    block_diag(&on_cokernels, &on_kernels)
                }
            };
        }
    }
    rep
}
