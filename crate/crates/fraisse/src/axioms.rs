//! Homogeneity sequents `R_T(y) ∧ V(y) ⊢ ∃x (R_S(x) ∧ U(x) ∧ y = w(x))`
//! with `(T, V)` the pushforward of `(S, U)` along `w`. They are generated
//! as data and checked on models, never proved.

use presentation::{pushforward, Presentation};
use quiver_core::{AlgebraicSequent, Conclusion, Field, Matrix, Quiver, Term, Q};
use rand::Rng;
use sequent_engine::eval::affine_form;
use sequent_engine::{saturate, task_rng, Assignment, LinearModel, Theory, Verdict};
use serde::Serialize;
use serde_json::{json, Value};

use crate::FraisseError;

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneityAxiom {
    /// `(T, V)` over `y`.
    pub premise: Presentation,
    /// `(S, U)` over `x`.
    pub source: Presentation,
    pub tuple: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub sampled: usize,
    pub satisfied: usize,
}

/// Offsets of each variable in a stacked assignment vector.
fn offsets(h: &LinearModel, ctx: &quiver_core::Context) -> (Vec<usize>, usize) {
    let mut offs = Vec::new();
    let mut n = 0;
    for v in &ctx.0 {
        offs.push(n);
        n += h.dim(v.sort);
    }
    (offs, n)
}

/// Rows of `terms(v) = 0` as `A v = b`.
fn system(q: &Quiver, h: &LinearModel, terms: &[Term], offs: &[usize], n: usize) -> (Vec<Vec<Q>>, Vec<Q>) {
    let (mut rows, mut rhs) = (Vec::new(), Vec::new());
    for t in terms {
        let (a, c) = affine_form(q, h, t, offs, n);
        for r in 0..a.rows() {
            rows.push(a.row(r).to_vec());
            rhs.push(c[r].negated());
        }
    }
    (rows, rhs)
}

impl HomogeneityAxiom {
    pub fn display(&self, q: &Quiver) -> String {
        let vars = |p: &Presentation| p.context.0.iter().map(|v| v.name.clone()).collect::<Vec<_>>().join(", ");
        let rel = |p: &Presentation| {
            if p.generators.is_empty() {
                "⊤".to_string()
            } else {
                p.generators.iter().map(|t| format!("{} = 0", t.display(q))).collect::<Vec<_>>().join(" ∧ ")
            }
        };
        let eqs: Vec<String> =
            self.premise.context.0.iter().zip(&self.tuple).map(|(v, t)| format!("{} = {}", v.name, t.display(q))).collect();
        format!(
            "{} ⊢_{{{}}} ∃{} ({} ∧ {})",
            rel(&self.premise),
            vars(&self.premise),
            vars(&self.source),
            rel(&self.source),
            eqs.join(" ∧ ")
        )
    }

    pub fn to_json(&self, q: &Quiver) -> Value {
        json!({
            "premise": self.premise.to_json(q)["generators"],
            "source": self.source.to_json(q)["generators"],
            "tuple": self.tuple.iter().map(|t| t.display(q)).collect::<Vec<_>>(),
            "sequent": self.display(q),
        })
    }

    /// Whether some `x` with the source relations maps to `y`.
    pub fn has_witness(&self, q: &Quiver, h: &LinearModel, y: &Assignment) -> bool {
        let (offs, n) = offsets(h, &self.source.context);
        let (mut rows, mut rhs) = system(q, h, &self.source.generators, &offs, n);
        for (t, target) in self.tuple.iter().zip(y) {
            let (a, c) = affine_form(q, h, t, &offs, n);
            for r in 0..a.rows() {
                rows.push(a.row(r).to_vec());
                rhs.push(target[r].minus(&c[r]));
            }
        }
        if rows.is_empty() {
            return true;
        }
        Matrix::from_rows(rows, n).solve(&rhs).is_some()
    }

    /// Samples `y` among the solutions of the premise in `h` and counts
    /// those with a witness.
    pub fn check_in(&self, q: &Quiver, h: &LinearModel, samples: usize, seed: u64) -> AxiomCheck {
        let (offs, n) = offsets(h, &self.premise.context);
        let (rows, rhs) = system(q, h, &self.premise.generators, &offs, n);
        let (particular, directions) = if rows.is_empty() {
            (vec![Q::zero(); n], Matrix::<Q>::identity(n).col_vecs())
        } else {
            let m = Matrix::from_rows(rows, n);
            match m.solve(&rhs) {
                Some(x) => (x, m.kernel()),
                None => return AxiomCheck { sampled: 0, satisfied: 0 },
            }
        };
        let mut rng = task_rng(seed, 0);
        let mut satisfied = 0;
        for _ in 0..samples {
            let mut v = particular.clone();
            for d in &directions {
                let c = Q::from_i64(rng.gen_range(-5..=5));
                for (x, e) in v.iter_mut().zip(d) {
                    *x = x.plus(&c.times(e));
                }
            }
            let y: Assignment =
                self.premise.context.0.iter().zip(&offs).map(|(var, &o)| v[o..o + h.dim(var.sort)].to_vec()).collect();
            satisfied += usize::from(self.has_witness(q, h, &y));
        }
        AxiomCheck { sampled: samples, satisfied }
    }
}

/// One sequent per presentation and tuple. Each tuple must live over the
/// presentation's context; presentations whose relations prove `⊥` are
/// rejected.
pub fn homogeneity_axioms(
    theory: &Theory,
    presentations: &[Presentation],
    tuples: &[Vec<Term>],
    rounds: usize,
) -> Result<Vec<HomogeneityAxiom>, FraisseError> {
    let q = theory.quiver();
    let mut out = Vec::new();
    for p in presentations {
        let bottom = AlgebraicSequent {
            context: p.context.clone(),
            premises: p.generators.clone(),
            diers: p.independence.clone(),
            conclusion: Conclusion::Bottom,
        };
        if let Verdict::Proved(_) = saturate(theory, &bottom, rounds.max(1))? {
            return Err(FraisseError::Refuted(p.generators.iter().map(|t| t.display(q)).collect::<Vec<_>>().join(", ")));
        }
        for w in tuples {
            if w.iter().any(|t| t.context() != &p.context) {
                return Err(FraisseError::Context("tuple is not over the presentation's context".into()));
            }
            let premise = pushforward(theory, p, w, rounds)?;
            out.push(HomogeneityAxiom { premise, source: p.clone(), tuple: w.clone() });
        }
    }
    Ok(out)
}
