//! Chains `u0 -> u1 -> ...` that solve extension problems as they go.

use sequent_engine::task_rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::category::{sample_problem, Amalgamation, Extension, FiniteStructureCategory, Problem, Span};
use crate::FraisseError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolution {
    pub enqueued: usize,
    pub resolved: usize,
    /// `extended` when the current stage already solved it, `amalgamated`
    /// when the stage had to grow.
    pub how: &'static str,
}

pub struct Chain<C: FiniteStructureCategory> {
    pub stages: Vec<C::Object>,
    /// `links[i]: stages[i] -> stages[i + 1]`.
    pub links: Vec<C::Arrow>,
    pub resolutions: Vec<Resolution>,
    /// Step index of every problem left unsolved.
    pub pending: Vec<usize>,
    cat: C,
}

impl<C: FiniteStructureCategory + Clone> Chain<C> {
    pub fn last(&self) -> &C::Object {
        self.stages.last().expect("a chain has a first stage")
    }

    /// The composite arrow `stages[from] -> stages[to]`.
    pub fn link(&self, from: usize, to: usize) -> C::Arrow {
        assert!(from <= to && to < self.stages.len());
        let mut f = self.cat.identity(&self.stages[from]);
        for l in &self.links[from..to] {
            f = self.cat.compose(&f, l);
        }
        f
    }

    pub fn to_json(&self) -> Value {
        json!({
            "category": self.cat.name(),
            "stages": self.stages.iter().map(|s| self.cat.object_json(s)).collect::<Vec<_>>(),
            "links": self.links.iter().map(|l| self.cat.arrow_json(l)).collect::<Vec<_>>(),
            "resolutions": self.resolutions,
            "pending": self.pending,
        })
    }
}

/// Builds `steps` stages from the initial object (or a sampled one). Each
/// step enqueues the category's growth problems and one sampled problem
/// against the current stage, then solves every queued problem in order,
/// extending when possible and amalgamating otherwise.
pub fn fraisse_chain<C: FiniteStructureCategory + Clone>(cat: &C, steps: usize, seed: u64) -> Result<Chain<C>, FraisseError> {
    let mut rng = task_rng(seed, 0);
    let first = cat.initial().unwrap_or_else(|| cat.sample_object(&mut rng));
    let mut chain =
        Chain { stages: vec![first], links: Vec::new(), resolutions: Vec::new(), pending: Vec::new(), cat: cat.clone() };
    for step in 1..=steps {
        let start = chain.last().clone();
        let mut queue: Vec<Problem<C>> = cat.growth_problems(&start);
        queue.push(sample_problem(cat, &start, &mut rng));
        let mut current = start.clone();
        let mut since = cat.identity(&start);
        for p in queue {
            let chi = cat.compose(&p.chi, &since);
            let moved = Problem { chi, ..p };
            if let Extension::Extended(x) = cat.extend(&moved, &current) {
                if cat.is_arrow(&x, &moved.b, &current) && cat.same_arrow(&cat.compose(&moved.j, &x), &moved.chi, &current) {
                    chain.resolutions.push(Resolution { enqueued: step, resolved: step, how: "extended" });
                    continue;
                }
            }
            let span =
                Span { a: moved.a.clone(), b: moved.b.clone(), f: moved.j.clone(), c: current.clone(), g: moved.chi.clone() };
            match cat.amalgamate(&span) {
                Amalgamation::Amalgamated { d, g2, .. } => {
                    since = cat.compose(&since, &g2);
                    current = d;
                    chain.resolutions.push(Resolution { enqueued: step, resolved: step, how: "amalgamated" });
                }
                Amalgamation::Failed(_) | Amalgamation::Unknown(_) => {
                    return Err(FraisseError::Amalgamation(span.to_json(cat)));
                }
            }
        }
        chain.stages.push(current);
        chain.links.push(since);
    }
    Ok(chain)
}
