//! Presentations `(S, U)` over a context and their realizations.

use std::str::FromStr;

use quiver_core::{
    parse_term, AlgebraicSequent, Conclusion, Context, DiersAtom, Field, Matrix, Monomial, Quiver, SortId, Term, Q,
};
use sequent_engine::closure::{Closure, Universe};
use sequent_engine::saturate::UNIVERSE_CAP;
use sequent_engine::{derive, prove_in_i, Assignment, Budget, LinearModel, Submodel, Theory, Verdict};
use serde_json::{json, Value};

use crate::PresentationError;

/// Compositions considered when nothing else is said.
pub const DEFAULT_DEPTH: usize = 4;

/// An exact model and an assignment of the context at which exactly the
/// members of `S` vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub model: LinearModel,
    pub assignment: Assignment,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    pub context: Context,
    /// Generators of `S`; `S` itself is their deductive closure.
    pub generators: Vec<Term>,
    /// `U`: each atom lists coefficient-valued terms declared algebraically
    /// independent.
    pub independence: Vec<DiersAtom>,
    /// Longest path considered for monomials over the context.
    pub depth: usize,
    /// When present, membership in `S` is decided by evaluation.
    pub realization: Option<Realization>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Member,
    NonMember,
    Unknown,
}

/// Canonical generators of the relations among monomials of length at most
/// `depth`, given the value of each monomial.
pub fn kernel_generators(
    q: &Quiver,
    context: &Context,
    depth: usize,
    mut value: impl FnMut(SortId, &Monomial) -> Option<Vec<Q>>,
) -> Result<Vec<Term>, PresentationError> {
    let u = Universe::build(q, context, depth, UNIVERSE_CAP);
    if u.truncated {
        return Err(PresentationError::Truncated { depth });
    }
    let mut out = Vec::new();
    for s in q.sort_ids() {
        if u.sort_size(s) == 0 {
            continue;
        }
        let mut cols = Vec::with_capacity(u.sort_size(s));
        for i in 0..u.sort_size(s) {
            cols.push(value(s, u.mono_local(s, i)).ok_or(PresentationError::Truncated { depth })?);
        }
        let rows = cols[0].len();
        for k in Matrix::from_cols(&cols, rows).kernel() {
            out.push(u.term(q, s, &k));
        }
    }
    Ok(out)
}

/// A depth at which the relations of a generated submodel are complete: one
/// past its longest basis term.
pub(crate) fn closing_depth(sub: &Submodel, depth: usize) -> usize {
    let longest = sub.basis_terms.iter().flatten().map(|t| t.path.len()).max().unwrap_or(0);
    depth.max(longest + 1)
}

fn context_for(sorts: &[SortId]) -> Context {
    if sorts.len() == 1 {
        return Context::single("x", sorts[0]);
    }
    let names: Vec<String> = (1..=sorts.len()).map(|i| format!("x{i}")).collect();
    Context::from_pairs(names.iter().map(String::as_str).zip(sorts.iter().copied()))
}

/// The substructure generated by `gens` together with the presentation it
/// induces: `S` is everything vanishing at the generators, recorded through
/// generators up to a depth at which the closure is complete.
pub fn generated_submodel(
    q: &Quiver,
    m: &LinearModel,
    gens: &[(SortId, Vec<Q>)],
    depth: usize,
) -> Result<(Submodel, Presentation), PresentationError> {
    let sub = sequent_engine::generated_submodel(q, m, gens);
    let depth = closing_depth(&sub, depth);
    let sorts: Vec<SortId> = gens.iter().map(|(s, _)| *s).collect();
    let context = context_for(&sorts);
    let assignment: Assignment = gens.iter().map(|(_, v)| v.clone()).collect();
    let generators = kernel_generators(q, &context, depth, |_, mono| Some(m.eval_monomial(q, mono, &assignment)))?;
    let p = Presentation {
        context,
        generators,
        independence: Vec::new(),
        depth,
        realization: Some(Realization { model: m.clone(), assignment }),
    };
    Ok((sub, p))
}

impl Presentation {
    /// A presentation known only through its generators.
    pub fn new(
        context: Context,
        generators: Vec<Term>,
        independence: Vec<DiersAtom>,
        depth: usize,
    ) -> Result<Self, PresentationError> {
        for t in generators.iter().chain(independence.iter().flat_map(|a| &a.terms)) {
            if t.context() != &context {
                return Err(PresentationError::Context(format!("{t:?}")));
            }
        }
        Ok(Presentation { context, generators, independence, depth, realization: None })
    }

    /// `U ∧ S ⊢ w = 0`.
    pub fn sequent_for(&self, w: &Term) -> AlgebraicSequent {
        AlgebraicSequent {
            context: self.context.clone(),
            premises: self.generators.clone(),
            diers: self.independence.clone(),
            conclusion: Conclusion::Eq(w.clone()),
        }
    }

    /// Everything derivable from the generators over monomials of length at
    /// most `depth + extra`.
    pub fn closure(&self, theory: &Theory, extra: usize, rounds: usize) -> Closure {
        derive(theory, &self.context, &self.generators, rounds, self.depth + extra)
    }

    /// Whether `w` lies in `S`. A realization decides outright; otherwise a
    /// proof gives membership and a countermodel gives non-membership.
    pub fn membership(&self, theory: &Theory, w: &Term, budget: &Budget) -> Result<Membership, PresentationError> {
        if w.context() != &self.context {
            return Err(PresentationError::Context(w.display(theory.quiver())));
        }
        if let Some(r) = &self.realization {
            let v = r.model.eval_term(theory.quiver(), w, &r.assignment);
            return Ok(if v.iter().all(|x| x.is_zero()) { Membership::Member } else { Membership::NonMember });
        }
        Ok(match prove_in_i(theory, &self.sequent_for(w), budget)? {
            Verdict::Proved(_) => Membership::Member,
            Verdict::Refuted(_) => Membership::NonMember,
            Verdict::Unknown(_) => Membership::Unknown,
        })
    }

    /// Membership answered from a realization or a precomputed closure;
    /// `None` when neither settles it.
    pub(crate) fn quick_member(&self, q: &Quiver, closure: Option<&Closure>, w: &Term) -> Option<bool> {
        if let Some(r) = &self.realization {
            return Some(r.model.eval_term(q, w, &r.assignment).iter().all(|x| x.is_zero()));
        }
        let cl = closure?;
        let v = cl.universe.vector(w)?;
        cl.contains(w.target(), &v).then_some(true)
    }

    pub fn to_json(&self, q: &Quiver) -> Value {
        let context: Vec<Value> = self.context.0.iter().map(|v| json!({ "name": v.name, "sort": q.sort_name(v.sort) })).collect();
        let mut terms: Vec<&Term> = Vec::new();
        for t in self.independence.iter().flat_map(|a| &a.terms) {
            if !terms.contains(&t) {
                terms.push(t);
            }
        }
        let matrix: Vec<Vec<u8>> =
            self.independence.iter().map(|a| terms.iter().map(|t| u8::from(a.terms.contains(t))).collect()).collect();
        let mut out = json!({
            "context": context,
            "depth": self.depth,
            "generators": self.generators.iter().map(|t| t.display(q)).collect::<Vec<_>>(),
            "independence": {
                "terms": terms.iter().map(|t| t.display(q)).collect::<Vec<_>>(),
                "matrix": matrix,
            },
        });
        if let Some(r) = &self.realization {
            out["realization"] = json!({
                "model": r.model.to_json_value(),
                "assignment": r.assignment.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
        }
        out
    }

    pub fn from_json(q: &Quiver, v: &Value) -> Result<Self, PresentationError> {
        let bad = |m: &str| PresentationError::Json(m.to_string());
        let vars = v["context"].as_array().ok_or_else(|| bad("context"))?;
        let mut pairs = Vec::new();
        for var in vars {
            let name = var["name"].as_str().ok_or_else(|| bad("variable name"))?;
            let sort = var["sort"].as_str().and_then(|s| q.sort_by_name(s)).ok_or_else(|| bad("variable sort"))?;
            pairs.push((name, sort));
        }
        let context = Context::from_pairs(pairs);
        let depth = v["depth"].as_u64().map_or(DEFAULT_DEPTH, |d| d as usize);
        let term = |s: &Value, expected: Option<SortId>| -> Result<Term, PresentationError> {
            let text = s.as_str().ok_or_else(|| bad("term"))?;
            parse_term(text, q, &context, expected).map_err(|e| PresentationError::Json(e.to_string()))
        };
        let generators = v["generators"]
            .as_array()
            .ok_or_else(|| bad("generators"))?
            .iter()
            .map(|s| term(s, None))
            .collect::<Result<Vec<_>, _>>()?;
        let ind = &v["independence"];
        let terms = match ind["terms"].as_array() {
            Some(ts) => ts.iter().map(|s| term(s, Some(q.coefficient()))).collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        let mut independence = Vec::new();
        for row in ind["matrix"].as_array().map(Vec::as_slice).unwrap_or_default() {
            let row = row.as_array().ok_or_else(|| bad("independence row"))?;
            if row.len() != terms.len() {
                return Err(bad("independence row length"));
            }
            let atom: Vec<Term> = row.iter().zip(&terms).filter(|(x, _)| x.as_u64() == Some(1)).map(|(_, t)| t.clone()).collect();
            independence.push(DiersAtom { terms: atom });
        }
        let realization = match v.get("realization") {
            Some(r) => {
                let model = LinearModel::from_json_value(q, r["model"].clone()).map_err(PresentationError::Json)?;
                let assignment = r["assignment"]
                    .as_array()
                    .ok_or_else(|| bad("assignment"))?
                    .iter()
                    .map(|vec| {
                        vec.as_array()
                            .ok_or_else(|| bad("assignment vector"))?
                            .iter()
                            .map(|x| x.as_str().and_then(|s| Q::from_str(s).ok()).ok_or_else(|| bad("rational")))
                            .collect::<Result<Vec<Q>, _>>()
                    })
                    .collect::<Result<Assignment, _>>()?;
                model.check_assignment(&context, &assignment)?;
                Some(Realization { model, assignment })
            }
            None => None,
        };
        Ok(Presentation { context, generators, independence, depth, realization })
    }
}
