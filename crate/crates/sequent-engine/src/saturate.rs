//! Forward saturation over a bounded universe.
//!
//! Round 0 closes the premises under the relations and post-composition. Each
//! further round applies every conditional rule to the whole subspace of terms
//! satisfying its premises, then closes again. Rule groups are evaluated in
//! parallel against a snapshot and their conclusions inserted in group order.

use std::collections::{BTreeMap, BTreeSet};

use quiver_core::{AlgebraicSequent, Conclusion, Context, Field, Matrix, Term, Q};
use rayon::prelude::*;

use crate::closure::{Closure, Combo, Justification, Universe};
use crate::prove::{EngineError, Exhausted, Verdict};
use crate::theory::{instantiate_relations, RuleSet, Theory};
use crate::trace::{Finish, Step, StepKind, Trace};

/// Default ceiling on the number of universe monomials.
pub const UNIVERSE_CAP: usize = 4000;

struct Candidate {
    rule: usize,
    u: Vec<Q>,
}

/// The kernel of the stacked premise residuals over the columns `cols`.
fn satisfying(premise_images: &[Vec<Vec<Q>>], cols: &[usize]) -> Vec<Vec<Q>> {
    if premise_images.is_empty() {
        return (0..cols.len())
            .map(|i| {
                let mut v = vec![Q::zero(); cols.len()];
                v[i] = Q::one();
                v
            })
            .collect();
    }
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for images in premise_images {
        let height = images.first().map_or(0, |v| v.len());
        for r in 0..height {
            let row: Vec<Q> = cols.iter().map(|&c| images[c][r].clone()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return satisfying(&[], cols);
    }
    Matrix::from_rows(rows, cols.len()).kernel()
}

fn group_candidates(theory: &Theory, rules: &RuleSet, g: usize, cl: &Closure) -> Vec<Candidate> {
    let q = theory.quiver();
    let group = &rules.groups[g];
    let u = &cl.universe;
    let size = u.sort_size(group.src);
    // Monomials where every premise is representable, with residual images.
    let mut domain = Vec::new();
    let mut images: Vec<Vec<Vec<Q>>> = vec![Vec::new(); group.premises.len()];
    for local in 0..size {
        let m = u.by_sort[group.src.0][local];
        let mut per = Vec::with_capacity(group.premises.len());
        for a in &group.premises {
            match u.arrow_at(q, a, m) {
                Some(sparse) => {
                    let mut v = vec![Q::zero(); u.sort_size(a.tgt)];
                    for (i, c) in sparse {
                        v[i] = c;
                    }
                    per.push(cl.spaces[a.tgt.0].reduce(&v));
                }
                None => break,
            }
        }
        if per.len() == group.premises.len() {
            domain.push(local);
            for (j, v) in per.into_iter().enumerate() {
                images[j].push(v);
            }
        }
    }
    if domain.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut kernels: BTreeMap<Vec<usize>, Vec<Vec<Q>>> = BTreeMap::new();
    for &ri in &group.rules {
        let rule = &rules.rules[ri];
        let cols: Vec<usize> =
            (0..domain.len()).filter(|&k| u.arrow_at(q, &rule.conclusion, u.by_sort[group.src.0][domain[k]]).is_some()).collect();
        if cols.is_empty() {
            continue;
        }
        let basis = kernels.entry(cols.clone()).or_insert_with(|| satisfying(&images, &cols));
        for k in basis.iter() {
            let mut full = vec![Q::zero(); size];
            for (x, &c) in k.iter().zip(&cols) {
                full[domain[c]] = x.clone();
            }
            let concl = u.arrow_vec(q, &rule.conclusion, &full).expect("representable on the domain");
            if !cl.contains(rule.conclusion.tgt, &concl) {
                out.push(Candidate { rule: ri, u: full });
            }
        }
    }
    out
}

/// What the current closure proves about the goal.
fn check_goal(q: &quiver_core::Quiver, cl: &Closure, goal: &AlgebraicSequent) -> Option<Finish> {
    let k0 = q.coefficient();
    let unit = cl.universe.vector(&Term::unit(q, &goal.context)).expect("unit is in every universe");
    if let Some(c) = cl.explain(k0, &unit) {
        return Some(Finish::ExFalso(c.into_iter().collect()));
    }
    for (ai, atom) in goal.diers.iter().enumerate() {
        let mut vecs = vec![unit.clone()];
        for t in &atom.terms {
            match cl.universe.vector(t) {
                Some(v) => vecs.push(v),
                None => {
                    vecs.clear();
                    break;
                }
            }
        }
        if vecs.is_empty() {
            continue;
        }
        let residuals: Vec<Vec<Q>> = vecs.iter().map(|v| cl.spaces[k0.0].reduce(v)).collect();
        let n = unit.len();
        if let Some(k) = Matrix::from_cols(&residuals, n).kernel().into_iter().next() {
            let mut sum = vec![Q::zero(); n];
            for (v, c) in vecs.iter().zip(&k) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s = s.plus(&c.times(x));
                }
            }
            let combo = cl.explain(k0, &sum).expect("dependence lies in the provable subspace");
            return Some(Finish::DiersClash { atom: ai, coeffs: k, combination: combo.into_iter().collect() });
        }
    }
    match &goal.conclusion {
        Conclusion::Eq(t) => {
            let v = cl.universe.vector(t)?;
            cl.explain(t.target(), &v).map(|c| Finish::Combination(c.into_iter().collect()))
        }
        Conclusion::Diers(d) => {
            goal.diers.iter().position(|a| d.terms.iter().all(|t| a.terms.contains(t))).map(|atom| Finish::Assumption { atom })
        }
        Conclusion::Bottom => None,
    }
}

fn facts_of(finish: &Finish) -> Vec<usize> {
    match finish {
        Finish::Combination(c) | Finish::ExFalso(c) => c.iter().map(|(k, _)| *k).collect(),
        Finish::DiersClash { combination, .. } => combination.iter().map(|(k, _)| *k).collect(),
        Finish::Assumption { .. } => Vec::new(),
    }
}

fn extract_trace(theory: &Theory, rules: &RuleSet, cl: &Closure, finish: Finish, rounds: usize) -> Trace {
    let q = theory.quiver();
    let mut needed = BTreeSet::new();
    let mut stack = facts_of(&finish);
    while let Some(f) = stack.pop() {
        if !needed.insert(f) {
            continue;
        }
        match &cl.facts[f].just {
            Justification::Subst { parent, .. } => stack.push(*parent),
            Justification::Rule { premises, .. } => stack.extend(premises.iter().flat_map(|c| c.keys().copied())),
            _ => {}
        }
    }
    let renum: BTreeMap<usize, usize> = needed.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let map_combo = |c: &Combo| -> Vec<(usize, Q)> { c.iter().map(|(k, x)| (renum[k], x.clone())).collect() };
    let map_list = |c: &[(usize, Q)]| -> Vec<(usize, Q)> { c.iter().map(|(k, x)| (renum[k], x.clone())).collect() };
    let steps = needed
        .iter()
        .map(|&f| {
            let fact = &cl.facts[f];
            let term = cl.universe.term(q, fact.sort, &fact.vec);
            let kind = match &fact.just {
                Justification::Premise(i) => StepKind::Premise(*i),
                Justification::Given(i) => StepKind::Given(*i),
                Justification::Relation { relation, at } => {
                    StepKind::Relation { relation: *relation, at: cl.universe.monos[*at].clone() }
                }
                Justification::Subst { parent, edge } => StepKind::Subst { parent: renum[parent], edge: *edge },
                Justification::Rule { rule, u, premises } => {
                    let r = &rules.rules[*rule];
                    StepKind::Rule {
                        rule: Box::new(r.clone()),
                        u: cl.universe.term(q, r.src, u),
                        premises: premises.iter().map(map_combo).collect(),
                    }
                }
            };
            Step { term, kind }
        })
        .collect();
    let finish = match finish {
        Finish::Combination(c) => Finish::Combination(map_list(&c)),
        Finish::ExFalso(c) => Finish::ExFalso(map_list(&c)),
        Finish::DiersClash { atom, coeffs, combination } => {
            Finish::DiersClash { atom, coeffs, combination: map_list(&combination) }
        }
        a @ Finish::Assumption { .. } => a,
    };
    Trace { steps, finish, rounds }
}

/// Saturates the goal's premises under the theory for `depth` rounds.
pub fn saturate(theory: &Theory, goal: &AlgebraicSequent, depth: usize) -> Result<Verdict, EngineError> {
    saturate_with_cap(theory, goal, depth, UNIVERSE_CAP)
}

pub fn saturate_with_cap(theory: &Theory, goal: &AlgebraicSequent, depth: usize, cap: usize) -> Result<Verdict, EngineError> {
    if depth == 0 {
        return Err(EngineError::Budget("saturation depth must be positive".into()));
    }
    let q = theory.quiver();
    let universe = Universe::build(q, &goal.context, goal.depth() + depth, cap);
    let truncated = universe.truncated;
    let rules = theory.rules(depth);
    let mut found = None;
    let (cl, rounds) = run(theory, &rules, universe, &goal.premises, depth, |cl| {
        found = check_goal(q, cl, goal);
        found.is_some()
    });
    Ok(match found {
        Some(finish) => Verdict::Proved(Box::new(extract_trace(theory, &rules, &cl, finish, rounds))),
        None => Verdict::Unknown(Exhausted { rounds, depth, samples: 0, truncated }),
    })
}

/// Everything provable from `premises` over the monomials of length at most
/// `max_len`, after at most `depth` rule rounds.
pub fn derive(theory: &Theory, context: &Context, premises: &[Term], depth: usize, max_len: usize) -> Closure {
    let universe = Universe::build(theory.quiver(), context, max_len, UNIVERSE_CAP);
    let rules = theory.rules(depth.max(1));
    run(theory, &rules, universe, premises, depth, |_| false).0
}

/// Closes the premises round by round until `stop` holds, the rounds run out
/// or nothing new appears.
fn run(
    theory: &Theory,
    rules: &RuleSet,
    universe: Universe,
    premises: &[Term],
    depth: usize,
    mut stop: impl FnMut(&Closure) -> bool,
) -> (Closure, usize) {
    let q = theory.quiver();
    let context = universe.context.clone();
    let mut cl = Closure::new(q, universe);
    for (i, p) in premises.iter().enumerate() {
        if let Some(v) = cl.universe.vector(p) {
            cl.add(p.target(), v, Justification::Premise(i));
        }
    }
    for (i, ax) in theory.axioms.iter().enumerate() {
        if let (Conclusion::Eq(t), true) = (&ax.conclusion, ax.context.is_empty() && ax.premises.is_empty()) {
            if let Some(v) = cl.universe.vector(&t.with_context(context.clone())) {
                cl.add(t.target(), v, Justification::Given(i));
            }
        }
    }
    instantiate_relations(q, &mut cl, &theory.relations);
    cl.drain(q);
    let active: Vec<usize> = (0..rules.groups.len()).filter(|&g| cl.universe.sort_size(rules.groups[g].src) > 0).collect();
    let mut rounds = 0;
    while !stop(&cl) && rounds < depth {
        rounds += 1;
        let found: Vec<Vec<Candidate>> = active.par_iter().map(|&g| group_candidates(theory, rules, g, &cl)).collect();
        let before = cl.facts.len();
        for c in found.into_iter().flatten() {
            let rule = &rules.rules[c.rule];
            let concl = cl.universe.arrow_vec(q, &rule.conclusion, &c.u).expect("representable");
            if cl.contains(rule.conclusion.tgt, &concl) {
                continue;
            }
            let premises: Vec<Combo> = rule
                .premises
                .iter()
                .map(|a| {
                    let v = cl.universe.arrow_vec(q, a, &c.u).expect("representable");
                    cl.explain(a.tgt, &v).expect("premise holds at a satisfying term")
                })
                .collect();
            cl.add(rule.conclusion.tgt, concl, Justification::Rule { rule: c.rule, u: c.u, premises });
        }
        cl.drain(q);
        if cl.facts.len() == before {
            break;
        }
    }
    (cl, rounds)
}

/// Whether `t = 0` follows from the goal's premises; convenience for callers
/// holding a term rather than a sequent.
pub fn proves_zero(theory: &Theory, premises: &[Term], t: &Term, depth: usize) -> bool {
    let goal = AlgebraicSequent::equation(t.context().clone(), premises.to_vec(), t.clone());
    matches!(saturate(theory, &goal, depth), Ok(Verdict::Proved(_)))
}
