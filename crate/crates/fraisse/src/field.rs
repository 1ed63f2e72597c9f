//! Homogeneity of pairs `(V, K)`: a vector space over a variable field of
//! characteristic zero, with injective pairs of maps.
//!
//! `K` is `Q(t0, .., t{N-1})` together with a list of declared degrees for
//! which it contains roots; `V = K^d`. A finitely generated subfield `K0` is
//! `Q(t0, .., t{r-1})`, embedded by the identity on variable indices, so a
//! field embedding `u: K1 -> K` extending it sends new transcendentals to
//! unused ones.
//!
//! Vector problems follow the classical construction: extend the field map,
//! pick a maximal `K1`-independent set of images of a basis of `V0`, map it
//! through `ξ1`, then extend from the span `V'` to `V1`. The second step is
//! only well defined when every linear relation among the images over `K1`
//! is carried by `ξ1`; that is checked rather than assumed, and a problem
//! where it breaks is reported as failed.

use quiver_core::{Field, Matrix, RatFunc, Q};
use rand::Rng;
use sequent_engine::task_rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::category::Summary;
use crate::vector::random_embedding;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldFragment {
    /// Number of algebraically independent generators of `K`.
    pub transcendence: usize,
    /// Degrees of the algebraic extensions `K` is declared to absorb.
    pub closure_degrees: Vec<u32>,
    /// Dimension of `V` over `K`.
    pub dim: usize,
}

/// How sampled maps `f1: V0 -> V1` treat a basis of `V0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Images {
    /// Entries in `K0`: images stay independent over `K1`.
    Generic,
    /// One image is a `K1`-multiple of the others, using a new
    /// transcendental.
    Dependent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldStep {
    /// `Q(t0..t{base-1}) ⊆ Q(t0..t{base+added-1})`.
    Transcendental { base: usize, added: usize },
    /// Adjoin a root of an irreducible polynomial of the given degree.
    Root { base: usize, degree: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldRecord {
    pub step: FieldStep,
    pub outcome: &'static str,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VectorRecord {
    pub base: usize,
    pub added: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    /// Columns of `f1` forming a maximal `K1`-independent subset.
    pub independent: Vec<usize>,
    /// `f1` lands in the `K1`-span of the chosen columns.
    pub factorization: bool,
    /// `ξ1` respects every `K1`-relation among the images.
    pub commutes: bool,
    pub outcome: &'static str,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldReport {
    pub fragment: FieldFragment,
    pub images: Images,
    pub fields: Vec<FieldRecord>,
    pub vectors: Vec<VectorRecord>,
    pub field_summary: Summary,
    pub vector_summary: Summary,
}

fn summarize<'a>(outcomes: impl Iterator<Item = &'a str>) -> Summary {
    let all: Vec<&str> = outcomes.collect();
    if all.contains(&"failed") {
        Summary::Fails
    } else if all.contains(&"unknown") {
        Summary::Unknown
    } else {
        Summary::Holds
    }
}

fn show(v: &[RatFunc]) -> Vec<String> {
    v.iter().map(RatFunc::to_string).collect()
}

fn lift(m: &Matrix<Q>) -> Matrix<RatFunc> {
    m.map(RatFunc::from_q)
}

/// Field extension problems: `K0 -> K1` against the fixed `K0 -> K`.
fn field_record(k: &FieldFragment, step: FieldStep) -> FieldRecord {
    let (outcome, detail) = match step {
        FieldStep::Transcendental { base, added } => {
            let available = k.transcendence - base;
            if added <= available {
                let images: Vec<String> = (base..base + added).map(|i| RatFunc::var(i).to_string()).collect();
                ("extended", json!({ "new_generators_to": images }))
            } else {
                ("failed", json!({ "needed": added, "available": available }))
            }
        }
        FieldStep::Root { degree, .. } => {
            if k.closure_degrees.contains(&degree) {
                ("extended", json!({ "declared_degree": degree }))
            } else {
                ("failed", json!({ "undeclared_degree": degree }))
            }
        }
    };
    FieldRecord { step, outcome, detail }
}

fn sample_field_step<R: Rng>(k: &FieldFragment, rng: &mut R) -> FieldStep {
    let base = rng.gen_range(0..=k.transcendence.min(2));
    if rng.gen_bool(0.25) {
        FieldStep::Root { base, degree: rng.gen_range(2..=3) }
    } else {
        FieldStep::Transcendental { base, added: rng.gen_range(1..=2) }
    }
}

fn vector_record<R: Rng>(k: &FieldFragment, images: Images, rng: &mut R) -> VectorRecord {
    let base = rng.gen_range(0..=k.transcendence.min(1));
    let mut added = rng.gen_range(0..=(k.transcendence - base).min(2));
    let mut n = rng.gen_range(0..=k.dim.min(2));
    let dependent = images == Images::Dependent && k.transcendence > base && k.dim >= 2;
    if dependent {
        added = added.max(1);
        n = 2;
    }
    let f1: Matrix<RatFunc> = if dependent {
        // [a | c · t_base · a] with a ∈ Q^1: independent over K0, not over K1.
        let a = RatFunc::from_q(&Q::from_i64(rng.gen_range(1..=3)));
        let c = RatFunc::from_q(&Q::from_i64(rng.gen_range(1..=3))).times(&RatFunc::var(base));
        Matrix::from_rows(vec![vec![a.clone(), c.times(&a)]], 2)
    } else {
        let m = n + rng.gen_range(0..=1);
        lift(&random_embedding(n, m, rng).matrix)
    };
    let m = f1.rows();
    let xi1 = lift(&random_embedding(n, k.dim, rng).matrix);
    let k1 = base + added;

    let independent = f1.independent_columns();
    let fs = f1.select_cols(&independent);
    let xs = xi1.select_cols(&independent);
    let mut factorization = true;
    let mut commutes = true;
    let mut detail = json!(null);
    for i in (0..n).filter(|i| !independent.contains(i)) {
        let Some(c) = fs.solve(&f1.col(i)) else {
            factorization = false;
            continue;
        };
        // u is the identity on variable indices, so u(c) = c.
        let transported = xs.mul_vec(&c);
        if transported != xi1.col(i) {
            commutes = false;
            detail = json!({
                "column": i,
                "coefficients": show(&c),
                "expected": show(&xi1.col(i)),
                "transported": show(&transported),
            });
        }
    }
    let record = |outcome, detail| VectorRecord {
        base,
        added,
        source_dim: n,
        target_dim: m,
        independent: independent.clone(),
        factorization,
        commutes,
        outcome,
        detail,
    };
    if !factorization {
        return record("unknown", json!("images outside the span of the chosen subset"));
    }
    if !commutes {
        return record("failed", detail);
    }
    if xs.rank() < independent.len() {
        return record("failed", json!("images of the independent subset are dependent in V"));
    }
    // Extend from V' to V1: complete f1's chosen columns to a K1-basis of V1
    // and the images to K-independent columns of V.
    let extra_src = completion(&fs.col_vecs(), m);
    let extra_dst = completion(&xs.col_vecs(), k.dim);
    if extra_dst.len() >= extra_src.len() {
        let mut src = fs.col_vecs();
        src.extend(extra_src.iter().cloned());
        let mut dst = xs.col_vecs();
        dst.extend(extra_dst.into_iter().take(extra_src.len()));
        let basis = Matrix::from_cols(&src, m);
        let values = Matrix::from_cols(&dst, k.dim);
        let Some(inv) = basis.inverse() else {
            return record("unknown", json!("completed basis is singular"));
        };
        let chi1 = values.mul(&inv);
        if chi1.mul(&f1) != xi1 {
            return record("failed", json!("constructed map does not commute"));
        }
        let rows: Vec<Vec<String>> = chi1.row_vecs().iter().map(|r| show(r)).collect();
        return record("extended", json!({ "chi": rows }));
    }
    if k.transcendence > k1 {
        // dim over u(K1) of V is infinite.
        return record("extended", json!({ "by": "dimension", "transcendence": k.transcendence, "image": k1 }));
    }
    record("failed", json!({ "needed": m, "available": k.dim }))
}

/// Identity columns completing `cols` to a basis of `K^n`.
fn completion(cols: &[Vec<RatFunc>], n: usize) -> Vec<Vec<RatFunc>> {
    let mut span = quiver_core::Subspace::spanned_by(n, cols);
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() }).collect::<Vec<_>>())
        .filter(|e| span.insert(e.clone()))
        .collect()
}

pub fn variable_field_homogeneity(k: &FieldFragment, images: Images, samples: usize, seed: u64) -> FieldReport {
    let mut rng = task_rng(seed, 0);
    let fields: Vec<FieldRecord> = (0..samples).map(|_| field_record(k, sample_field_step(k, &mut rng))).collect();
    let field_summary = summarize(fields.iter().map(|r| r.outcome));
    let vectors: Vec<VectorRecord> = if field_summary == Summary::Holds {
        (0..samples).map(|_| vector_record(k, images, &mut rng)).collect()
    } else {
        Vec::new()
    };
    // Vector problems presuppose the field step; they are not run otherwise.
    let vector_summary =
        if field_summary == Summary::Holds { summarize(vectors.iter().map(|r| r.outcome)) } else { Summary::Unknown };
    FieldReport { fragment: k.clone(), images, fields, vectors, field_summary, vector_summary }
}
