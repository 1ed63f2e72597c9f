//! Finite-dimensional rational vector spaces with injective linear maps.

use quiver_core::{Field, Matrix, Q};
use rand::Rng;
use sequent_engine::random::small_int;
use serde_json::{json, Value};

use crate::category::{Amalgamation, Extension, FiniteStructureCategory, Problem, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VectorSpace {
    pub dim: usize,
}

/// A `dst x src` matrix of full column rank.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEmbedding {
    pub matrix: Matrix<Q>,
}

#[derive(Clone, Copy, Debug)]
pub struct VectorSpaces {
    /// Largest number of dimensions a sampled arrow adds.
    pub max_growth: usize,
}

impl Default for VectorSpaces {
    fn default() -> Self {
        VectorSpaces { max_growth: 2 }
    }
}

pub fn random_embedding<R: Rng>(src: usize, dst: usize, rng: &mut R) -> LinearEmbedding {
    assert!(src <= dst, "no embedding of dimension {src} into {dst}");
    loop {
        let rows = (0..dst).map(|_| (0..src).map(|_| small_int(rng)).collect()).collect();
        let m = Matrix::from_rows(rows, src);
        if m.is_injective() {
            return LinearEmbedding { matrix: m };
        }
    }
}

impl VectorSpaces {
    /// An extension problem `j: a -> b`, `χ: a -> u` with prescribed dimensions.
    pub fn problem<R: Rng>(&self, a: usize, b: usize, u: usize, rng: &mut R) -> Problem<Self> {
        Problem {
            a: VectorSpace { dim: a },
            b: VectorSpace { dim: b },
            j: random_embedding(a, b, rng),
            chi: random_embedding(a, u, rng),
        }
    }
}

/// Columns of the identity completing `cols` to a basis of `Q^n`.
fn completion(cols: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let mut basis = quiver_core::Subspace::spanned_by(n, cols);
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![Q::zero(); n];
        e[i] = Q::one();
        if basis.insert(e.clone()) {
            out.push(e);
        }
    }
    out
}

impl FiniteStructureCategory for VectorSpaces {
    type Object = VectorSpace;
    type Arrow = LinearEmbedding;

    fn name(&self) -> &'static str {
        "vector"
    }

    fn initial(&self) -> Option<VectorSpace> {
        Some(VectorSpace { dim: 0 })
    }

    fn from_initial(&self, a: &VectorSpace) -> Option<LinearEmbedding> {
        Some(LinearEmbedding { matrix: Matrix::zeros(a.dim, 0) })
    }

    fn identity(&self, a: &VectorSpace) -> LinearEmbedding {
        LinearEmbedding { matrix: Matrix::identity(a.dim) }
    }

    fn compose(&self, f: &LinearEmbedding, g: &LinearEmbedding) -> LinearEmbedding {
        LinearEmbedding { matrix: g.matrix.mul(&f.matrix) }
    }

    fn is_arrow(&self, f: &LinearEmbedding, src: &VectorSpace, dst: &VectorSpace) -> bool {
        f.matrix.cols() == src.dim && f.matrix.rows() == dst.dim && f.matrix.is_injective()
    }

    fn sample_object<R: Rng>(&self, rng: &mut R) -> VectorSpace {
        VectorSpace { dim: rng.gen_range(0..=3) }
    }

    fn sample_arrow_from<R: Rng>(&self, a: &VectorSpace, rng: &mut R) -> (VectorSpace, LinearEmbedding) {
        let b = VectorSpace { dim: a.dim + rng.gen_range(0..=self.max_growth) };
        (b, random_embedding(a.dim, b.dim, rng))
    }

    fn sample_arrow_into<R: Rng>(&self, u: &VectorSpace, rng: &mut R) -> (VectorSpace, LinearEmbedding) {
        let a = VectorSpace { dim: rng.gen_range(0..=u.dim.min(2)) };
        (a, random_embedding(a.dim, u.dim, rng))
    }

    /// `(b ⊕ c) / {(f x, -g x)}`, with the quotient map read off a left
    /// kernel.
    fn amalgamate(&self, s: &Span<Self>) -> Amalgamation<Self> {
        let (nb, nc) = (s.b.dim, s.c.dim);
        let stacked = s.f.matrix.vstack(&s.g.matrix.scale(&Q::one().negated()));
        let rows = stacked.left_kernel();
        let d = rows.len();
        let quotient = Matrix::from_rows(rows, nb + nc);
        let f2 = quotient.select_cols(&(0..nb).collect::<Vec<_>>());
        let g2 = quotient.select_cols(&(nb..nb + nc).collect::<Vec<_>>());
        Amalgamation::Amalgamated {
            d: VectorSpace { dim: d },
            f2: LinearEmbedding { matrix: f2 },
            g2: LinearEmbedding { matrix: g2 },
            certificate: json!("pushout"),
        }
    }

    /// Completes `j(a)` to a basis of `b`, sends the new vectors to vectors of
    /// `u` independent from `χ(a)`.
    fn extend(&self, p: &Problem<Self>, u: &VectorSpace) -> Extension<LinearEmbedding> {
        if p.b.dim > u.dim {
            return Extension::Failed(json!({ "source_dim": p.b.dim, "target_dim": u.dim }));
        }
        let j_cols = p.j.matrix.col_vecs();
        let extra = completion(&j_cols, p.b.dim);
        let chi_cols = p.chi.matrix.col_vecs();
        let images = completion(&chi_cols, u.dim);
        let mut src = j_cols;
        src.extend(extra.iter().cloned());
        let mut dst = chi_cols;
        dst.extend(images.into_iter().take(extra.len()));
        let basis = Matrix::from_cols(&src, p.b.dim);
        let values = Matrix::from_cols(&dst, u.dim);
        let inverse = basis.inverse().expect("a completed basis is invertible");
        Extension::Extended(LinearEmbedding { matrix: values.mul(&inverse) })
    }

    /// Add one dimension.
    fn growth_problems(&self, u: &VectorSpace) -> Vec<Problem<Self>> {
        let b = VectorSpace { dim: u.dim + 1 };
        let j = Matrix::identity(u.dim).vstack(&Matrix::zeros(1, u.dim));
        vec![Problem { a: *u, b, j: LinearEmbedding { matrix: j }, chi: self.identity(u) }]
    }

    fn object_json(&self, a: &VectorSpace) -> Value {
        json!({ "dim": a.dim })
    }

    fn arrow_json(&self, f: &LinearEmbedding) -> Value {
        let rows: Vec<Vec<String>> = f.matrix.row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        json!({ "rows": f.matrix.rows(), "cols": f.matrix.cols(), "matrix": rows })
    }
}
