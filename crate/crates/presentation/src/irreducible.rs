//! Whether a presentation presents a model: either `R_S ∧ U ⊢ ⊥` is proved,
//! or a model is found in which exactly `S` vanishes.

use quiver_core::{AlgebraicSequent, Conclusion, Field, Matrix, Quiver, Q};
use rand::Rng;
use sequent_engine::eval::affine_form;
use sequent_engine::random::small_int;
use sequent_engine::{random_exact_model, saturate, task_rng, Assignment, Budget, Dims, LinearModel, Theory, Trace, Verdict};

use crate::models::initial_model;
use crate::present::{kernel_generators, Presentation, Realization};
use crate::PresentationError;

#[derive(Clone, Debug, PartialEq)]
pub enum Irreducibility {
    /// A model realizing exactly `S`.
    Irreducible(Box<Realization>),
    /// A derivation of `⊥` from the relations and `U`.
    Reducible(Box<Trace>),
    Unknown,
}

impl Irreducibility {
    pub fn tag(&self) -> &'static str {
        match self {
            Irreducibility::Irreducible(_) => "proved",
            Irreducibility::Reducible(_) => "refuted",
            Irreducibility::Unknown => "unknown",
        }
    }
}

/// Models that validate every sequent of the theory.
fn trusted(q: &Quiver, m: &LinearModel) -> bool {
    m.is_exact() || *m == initial_model(q)
}

/// The relations of `r` among monomials up to the presentation depth all
/// follow from the generators.
fn realizes(theory: &Theory, p: &Presentation, r: &Realization, rounds: usize) -> Result<bool, PresentationError> {
    let q = theory.quiver();
    if !trusted(q, &r.model) || r.model.check_assignment(&p.context, &r.assignment).is_err() {
        return Ok(false);
    }
    if p.generators.iter().any(|g| r.model.eval_term(q, g, &r.assignment).iter().any(|x| !x.is_zero())) {
        return Ok(false);
    }
    let relations = kernel_generators(q, &p.context, p.depth, |_, m| Some(r.model.eval_monomial(q, m, &r.assignment)))?;
    if relations.iter().all(|t| p.generators.contains(t)) {
        return Ok(true);
    }
    let cl = p.closure(theory, 0, rounds);
    Ok(relations.iter().all(|t| cl.universe.vector(t).is_some_and(|v| cl.contains(t.target(), &v))))
}

/// A generic solution of the relations in `m`, if there is one.
fn generic_solution(q: &Quiver, m: &LinearModel, p: &Presentation, rng: &mut impl Rng) -> Option<Assignment> {
    let mut offs = Vec::new();
    let mut n = 0;
    for v in &p.context.0 {
        offs.push(n);
        n += m.dim(v.sort);
    }
    let (mut rows, mut rhs) = (Vec::new(), Vec::new());
    for g in &p.generators {
        let (a, c) = affine_form(q, m, g, &offs, n);
        for r in 0..a.rows() {
            rows.push(a.row(r).to_vec());
            rhs.push(c[r].negated());
        }
    }
    let system = Matrix::from_rows(rows, n);
    let (mut x, kernel) = if system.rows() == 0 {
        (vec![Q::zero(); n], Matrix::<Q>::identity(n).col_vecs())
    } else {
        (system.solve(&rhs)?, system.kernel())
    };
    for k in kernel {
        let c = small_int(rng);
        for (xi, ki) in x.iter_mut().zip(&k) {
            *xi = xi.plus(&c.times(ki));
        }
    }
    Some(p.context.0.iter().zip(&offs).map(|(v, &o)| x[o..o + m.dim(v.sort)].to_vec()).collect())
}

/// Condition (i) of irreducibility, three-valued: a proof of `⊥` refutes, a
/// realizing model among the initial model and `budget.samples` exact models
/// proves.
pub fn is_irreducible(theory: &Theory, p: &Presentation, budget: &Budget) -> Result<Irreducibility, PresentationError> {
    let q = theory.quiver();
    let bottom = AlgebraicSequent {
        context: p.context.clone(),
        premises: p.generators.clone(),
        diers: p.independence.clone(),
        conclusion: Conclusion::Bottom,
    };
    if let Verdict::Proved(t) = saturate(theory, &bottom, budget.depth.max(1))? {
        return Ok(Irreducibility::Reducible(t));
    }
    if p.independence.iter().any(|a| !a.terms.is_empty()) {
        // Rational models never realize a transcendence condition.
        return Ok(Irreducibility::Unknown);
    }
    if let Some(r) = &p.realization {
        if realizes(theory, p, r, budget.depth)? {
            return Ok(Irreducibility::Irreducible(Box::new(r.clone())));
        }
    }
    let mut rng = task_rng(budget.seed, 0);
    for i in 0..=budget.samples {
        let model = if i == 0 {
            initial_model(q)
        } else {
            let seed: u64 = task_rng(budget.seed, i as u64).gen();
            random_exact_model(q, &Dims::uniform(q, budget.max_dim), seed)?
        };
        if let Some(assignment) = generic_solution(q, &model, p, &mut rng) {
            let r = Realization { model, assignment };
            if realizes(theory, p, &r, budget.depth)? {
                return Ok(Irreducibility::Irreducible(Box::new(r)));
            }
        }
    }
    Ok(Irreducibility::Unknown)
}
