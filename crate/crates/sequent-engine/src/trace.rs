//! Derivation traces and their independent replay on terms.

use quiver_core::{AlgebraicSequent, Conclusion, EdgeId, Field, Monomial, Quiver, Term, Q};
use serde_json::json;

use crate::arrow::Arrow;
use crate::theory::{Rule, Theory};

#[derive(Clone, Debug, PartialEq)]
pub enum StepKind {
    Premise(usize),
    Given(usize),
    Relation { relation: usize, at: Monomial },
    Subst { parent: usize, edge: EdgeId },
    Rule { rule: Box<Rule>, u: Term, premises: Vec<Vec<(usize, Q)>> },
}

/// One derived vanishing term.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub term: Term,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Finish {
    /// The goal term is this combination of steps.
    Combination(Vec<(usize, Q)>),
    /// `1` is this combination of steps.
    ExFalso(Vec<(usize, Q)>),
    /// `c0 * 1 + sum ci * ti` vanishes for an independence premise `atom`.
    DiersClash { atom: usize, coeffs: Vec<Q>, combination: Vec<(usize, Q)> },
    /// The conclusion's terms are among those of premise `atom`.
    Assumption { atom: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub steps: Vec<Step>,
    pub finish: Finish,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("step {step}: {msg}")]
    Step { step: usize, msg: String },
    #[error("final step: {0}")]
    Finish(String),
}

fn combine(steps: &[Step], items: &[(usize, Q)], limit: usize, zero: Term) -> Result<Term, String> {
    let mut acc = zero;
    for (k, c) in items {
        if *k >= limit {
            return Err(format!("reference to step {k} is not earlier"));
        }
        if steps[*k].term.target() != acc.target() {
            return Err(format!("step {k} has the wrong sort"));
        }
        acc = acc.add(&steps[*k].term.scale(c));
    }
    Ok(acc)
}

impl Trace {
    pub fn rules_used(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = self
            .steps
            .iter()
            .filter_map(|s| match &s.kind {
                StepKind::Rule { rule, .. } => Some(rule.name()),
                _ => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Re-derives every step from its justification.
    pub fn replay(&self, theory: &Theory, goal: &AlgebraicSequent) -> Result<(), ReplayError> {
        let q = theory.quiver();
        for (i, step) in self.steps.iter().enumerate() {
            let err = |msg: String| ReplayError::Step { step: i, msg };
            if step.term.context() != &goal.context {
                return Err(err("context differs from the goal".into()));
            }
            let expected = match &step.kind {
                StepKind::Premise(k) => goal.premises.get(*k).cloned().ok_or_else(|| err("no such premise".into()))?,
                StepKind::Given(k) => {
                    let ax = theory.axioms.get(*k).ok_or_else(|| err("no such axiom".into()))?;
                    match (&ax.conclusion, ax.context.is_empty() && ax.premises.is_empty()) {
                        (Conclusion::Eq(t), true) => t.with_context(goal.context.clone()),
                        _ => return Err(err("axiom is not a closed equation".into())),
                    }
                }
                StepKind::Relation { relation, at } => {
                    let r = theory.relations.get(*relation).ok_or_else(|| err("no such relation".into()))?;
                    let t = Term::from_monomials(goal.context.clone(), at.target(q, &goal.context), [(at.clone(), Q::one())]);
                    if t.target() != r.arrow.src {
                        return Err(err("relation applied at the wrong sort".into()));
                    }
                    r.arrow.apply(q, &t)
                }
                StepKind::Subst { parent, edge } => {
                    if *parent >= i {
                        return Err(err("parent is not earlier".into()));
                    }
                    self.steps[*parent].term.apply(q, *edge).map_err(|e| err(e.to_string()))?
                }
                StepKind::Rule { rule, u, premises } => {
                    theory.check_rule(rule).map_err(err)?;
                    if u.target() != rule.src || premises.len() != rule.premises.len() {
                        return Err(err("rule shape".into()));
                    }
                    for (a, combo) in rule.premises.iter().zip(premises) {
                        let want = a.apply(q, u);
                        let got = combine(&self.steps, combo, i, Term::zero(goal.context.clone(), a.tgt)).map_err(err)?;
                        if want != got {
                            return Err(err(format!("premise {} is not derived", want.display(q))));
                        }
                    }
                    rule.conclusion.apply(q, u)
                }
            };
            if expected != step.term {
                return Err(err(format!("recorded {} but derived {}", step.term.display(q), expected.display(q))));
            }
        }
        let n = self.steps.len();
        let unit = Term::unit(q, &goal.context);
        match &self.finish {
            Finish::Combination(items) => {
                let Conclusion::Eq(t) = &goal.conclusion else {
                    return Err(ReplayError::Finish("goal is not an equation".into()));
                };
                let got =
                    combine(&self.steps, items, n, Term::zero(goal.context.clone(), t.target())).map_err(ReplayError::Finish)?;
                if &got != t {
                    return Err(ReplayError::Finish(format!("combination gives {}", got.display(q))));
                }
            }
            Finish::ExFalso(items) => {
                let got = combine(&self.steps, items, n, Term::zero(goal.context.clone(), q.coefficient()))
                    .map_err(ReplayError::Finish)?;
                if got != unit {
                    return Err(ReplayError::Finish("combination is not 1".into()));
                }
            }
            Finish::DiersClash { atom, coeffs, combination } => {
                let d = goal.diers.get(*atom).ok_or_else(|| ReplayError::Finish("no such atom".into()))?;
                if coeffs.len() != d.terms.len() + 1 || coeffs.iter().all(|c| c.is_zero()) {
                    return Err(ReplayError::Finish("coefficients".into()));
                }
                let mut want = unit.scale(&coeffs[0]);
                for (t, c) in d.terms.iter().zip(&coeffs[1..]) {
                    want = want.add(&t.scale(c));
                }
                let got = combine(&self.steps, combination, n, Term::zero(goal.context.clone(), q.coefficient()))
                    .map_err(ReplayError::Finish)?;
                if got != want {
                    return Err(ReplayError::Finish("dependence is not derived".into()));
                }
            }
            Finish::Assumption { atom } => {
                let d = goal.diers.get(*atom).ok_or_else(|| ReplayError::Finish("no such atom".into()))?;
                let Conclusion::Diers(c) = &goal.conclusion else {
                    return Err(ReplayError::Finish("goal is not an independence claim".into()));
                };
                if !c.terms.iter().all(|t| d.terms.contains(t)) {
                    return Err(ReplayError::Finish("conclusion is not contained in the premise".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self, q: &Quiver) -> serde_json::Value {
        let combo =
            |items: &[(usize, Q)]| -> Vec<serde_json::Value> { items.iter().map(|(k, c)| json!([k, c.to_string()])).collect() };
        let arrow = |a: &Arrow| a.display(q, "x");
        let steps: Vec<serde_json::Value> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let (rule, from) = match &s.kind {
                    StepKind::Premise(k) => ("premise".to_string(), json!({ "premise": k })),
                    StepKind::Given(k) => ("axiom".to_string(), json!({ "axiom": k })),
                    StepKind::Relation { relation, at } => {
                        ("relation".to_string(), json!({ "relation": relation, "at": at.display(q, s.term.context()) }))
                    }
                    StepKind::Subst { parent, edge } => {
                        ("substitution".to_string(), json!({ "parent": parent, "edge": q.edge_name(*edge) }))
                    }
                    StepKind::Rule { rule, u, premises } => (
                        rule.name().to_string(),
                        json!({
                            "at": u.display(q),
                            "premises": rule.premises.iter().map(arrow).collect::<Vec<_>>(),
                            "conclusion": arrow(&rule.conclusion),
                            "side": rule.side.iter().map(|a| a.display(q, "y")).collect::<Vec<_>>(),
                            "premise_steps": premises.iter().map(|c| combo(c)).collect::<Vec<_>>(),
                        }),
                    ),
                };
                json!({ "id": i, "rule": rule, "term": s.term.display(q), "from": from })
            })
            .collect();
        let finish = match &self.finish {
            Finish::Combination(c) => json!({ "combination": combo(c) }),
            Finish::ExFalso(c) => json!({ "ex_falso": combo(c) }),
            Finish::DiersClash { atom, coeffs, combination } => json!({
                "independence_clash": atom,
                "coefficients": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "combination": combo(combination),
            }),
            Finish::Assumption { atom } => json!({ "assumption": atom }),
        };
        json!({ "rounds": self.rounds, "steps": steps, "finish": finish })
    }
}
