//! Three-valued provability: saturation for `Proved`, sampled exact models and
//! their generated substructures for `Refuted`.

use quiver_core::{AlgebraicSequent, Quiver};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::eval::{counterexample, fails_at};
use crate::model::{Assignment, LinearModel, ModelError};
use crate::random::{random_exact_model, Dims, RandomModelError};
use crate::saturate::saturate;
use crate::submodel::generated_submodel;
use crate::theory::Theory;
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid budget: {0}")]
    Budget(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Random(#[from] RandomModelError),
}

/// A substructure of a sampled exact model in which the goal fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub model: LinearModel,
    pub assignment: Assignment,
    /// Index of the sample that produced it.
    pub sample: usize,
    /// Dimensions of the exact model it sits in.
    pub ambient_dims: Vec<usize>,
}

impl Witness {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "sample": self.sample,
            "ambient_dims": self.ambient_dims,
            "model": self.model.to_json_value(),
            "assignment": self.assignment.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// Whether the goal really fails at the recorded assignment.
    pub fn replays(&self, q: &Quiver, goal: &AlgebraicSequent) -> bool {
        fails_at(q, &self.model, goal, &self.assignment).unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exhausted {
    pub rounds: usize,
    pub depth: usize,
    pub samples: usize,
    /// The term universe hit its size cap.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Proved(Box<Trace>),
    Refuted(Box<Witness>),
    Unknown(Exhausted),
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Proved(_) => "proved",
            Verdict::Refuted(_) => "refuted",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    pub fn to_json(&self, q: &Quiver) -> serde_json::Value {
        match self {
            Verdict::Proved(t) => json!({ "verdict": "proved", "trace": t.to_json(q) }),
            Verdict::Refuted(w) => json!({ "verdict": "refuted", "witness": w.to_json() }),
            Verdict::Unknown(e) => json!({ "verdict": "unknown", "exhausted": e }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Saturation rounds.
    pub depth: usize,
    /// Exact models sampled for refutation.
    pub samples: usize,
    /// Upper bound on every sampled dimension.
    pub max_dim: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { depth: 4, samples: 100, max_dim: 4, seed: 0 }
    }
}

/// Looks for a failing substructure in sample `index`.
pub fn refute_in_sample(
    q: &Quiver,
    goal: &AlgebraicSequent,
    budget: &Budget,
    index: usize,
) -> Result<Option<Witness>, EngineError> {
    let seed: u64 = crate::random::task_rng(budget.seed, index as u64 + 1).gen();
    let model = random_exact_model(q, &Dims::uniform(q, budget.max_dim), seed)?;
    let Some(assignment) = counterexample(q, &model, goal)? else {
        return Ok(None);
    };
    let gens: Vec<_> = goal.context.0.iter().map(|v| v.sort).zip(assignment.iter().cloned()).collect();
    let sub = generated_submodel(q, &model, &gens);
    let coords: Assignment = gens.iter().map(|(s, v)| sub.coordinates(*s, v).expect("generator lies in its submodel")).collect();
    Ok(Some(Witness { model: sub.model, assignment: coords, sample: index, ambient_dims: model.dims().to_vec() }))
}

/// Saturation first, then sampling. Samples run in parallel chunks and the
/// lowest failing index wins, so the verdict does not depend on threads.
pub fn prove_in_i(theory: &Theory, goal: &AlgebraicSequent, budget: &Budget) -> Result<Verdict, EngineError> {
    if budget.depth == 0 {
        return Err(EngineError::Budget("saturation depth must be positive".into()));
    }
    let proved = saturate(theory, goal, budget.depth)?;
    let Verdict::Unknown(mut exhausted) = proved else {
        return Ok(proved);
    };
    if !goal.has_diers() && theory.exactness {
        let q = theory.quiver();
        const CHUNK: usize = 16;
        let mut start = 0;
        while start < budget.samples {
            let end = (start + CHUNK).min(budget.samples);
            let results: Vec<Result<Option<Witness>, EngineError>> =
                (start..end).into_par_iter().map(|i| refute_in_sample(q, goal, budget, i)).collect();
            for r in results {
                if let Some(w) = r? {
                    return Ok(Verdict::Refuted(Box::new(w)));
                }
            }
            start = end;
        }
        exhausted.samples = budget.samples;
    }
    Ok(Verdict::Unknown(exhausted))
}
