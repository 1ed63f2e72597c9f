//! Theories: base relations, exactness rules and user axioms.
//!
//! Relations are unconditional identities between arrows. Exactness enters as
//! conditional rules: from `g(u) = 0` for the second leg `g` of a distinguished
//! pair `(f, g)` conclude `s(u) = 0` for every arrow `s` with `s o f = 0`, and
//! the two-pair scheme with premises `g0(u) = 0`, `g(chi(u)) = t(u)`.
//! Side conditions on arrows are decided by a relations-only closure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use quiver_core::{
    base_axioms, AlgebraicSequent, ArrowRelation, Atom, Conclusion, Context, Field, Matrix, Monomial, Quiver, SortId, Q,
};
use serde::Serialize;

use crate::arrow::{paths_from, Arrow};
use crate::closure::{Closure, Justification, Universe};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub label: String,
    pub arrow: Arrow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RuleKind {
    /// `s1 o f = s2 o f`; the conclusion is `s1 - s2`.
    E1 { pair: usize },
    /// `s o f = 0` for a single path `s`.
    E2 { pair: usize },
    /// Witness arrows of the two-pair scheme.
    E3 { outer: usize, inner: usize, p: Arrow, chi: Arrow, h: Arrow, t: Arrow, t2: Arrow },
    /// A single-variable axiom of the theory.
    Axiom { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub kind: RuleKind,
    pub src: SortId,
    pub premises: Vec<Arrow>,
    pub conclusion: Arrow,
    /// Arrows that must vanish modulo the relations.
    pub side: Vec<Arrow>,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self.kind {
            RuleKind::E1 { .. } => "E1",
            RuleKind::E2 { .. } => "E2",
            RuleKind::E3 { .. } => "E3",
            RuleKind::Axiom { .. } => "axiom",
        }
    }
}

/// Rules sharing a source sort and premise arrows.
#[derive(Clone, Debug)]
pub struct RuleGroup {
    pub src: SortId,
    pub premises: Vec<Arrow>,
    pub rules: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub groups: Vec<RuleGroup>,
}

impl RuleSet {
    fn push(&mut self, index: &mut BTreeMap<(SortId, Vec<Arrow>), usize>, rule: Rule) {
        let key = (rule.src, rule.premises.clone());
        let g = *index.entry(key).or_insert_with(|| {
            self.groups.push(RuleGroup { src: rule.src, premises: rule.premises.clone(), rules: Vec::new() });
            self.groups.len() - 1
        });
        self.groups[g].rules.push(self.rules.len());
        self.rules.push(rule);
    }
}

#[derive(Debug)]
pub struct Theory {
    quiver: Arc<Quiver>,
    pub relations: Vec<Relation>,
    /// Include the exactness rules.
    pub exactness: bool,
    pub axioms: Vec<AlgebraicSequent>,
    oracle: Mutex<HashMap<(SortId, usize), Arc<Closure>>>,
    rule_cache: Mutex<HashMap<usize, Arc<RuleSet>>>,
}

impl Clone for Theory {
    fn clone(&self) -> Self {
        Theory {
            quiver: self.quiver.clone(),
            relations: self.relations.clone(),
            exactness: self.exactness,
            axioms: self.axioms.clone(),
            oracle: Mutex::new(HashMap::new()),
            rule_cache: Mutex::new(HashMap::new()),
        }
    }
}

pub fn normalize_relation(q: &Quiver, r: &ArrowRelation) -> Arrow {
    let mut a = Arrow::zero(r.src, r.tgt);
    for (c, p) in &r.terms {
        a = a.add(&Arrow::path(r.src, r.tgt, quiver_core::normalize_path(q, p)).scale(c));
    }
    a
}

impl Theory {
    /// Base relations of the quiver plus the exactness rules.
    pub fn exact(q: Arc<Quiver>) -> Theory {
        let ax = base_axioms(&q);
        let relations = ax
            .axioms
            .iter()
            .map(|a| Relation { label: a.label.clone(), arrow: normalize_relation(&q, &a.relation) })
            .filter(|r| !r.arrow.is_zero())
            .collect();
        Theory::with_relations(q, relations, true)
    }

    /// Only the given relations; no exactness rules.
    pub fn equational(q: Arc<Quiver>, relations: Vec<Relation>) -> Theory {
        Theory::with_relations(q, relations, false)
    }

    fn with_relations(q: Arc<Quiver>, relations: Vec<Relation>, exactness: bool) -> Theory {
        Theory {
            quiver: q,
            relations,
            exactness,
            axioms: Vec::new(),
            oracle: Mutex::new(HashMap::new()),
            rule_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_axioms(mut self, axioms: Vec<AlgebraicSequent>) -> Theory {
        self.axioms = axioms;
        self.rule_cache = Mutex::new(HashMap::new());
        self
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn quiver_arc(&self) -> Arc<Quiver> {
        self.quiver.clone()
    }

    /// A closure of the relations alone over one variable of sort `src`.
    pub fn relation_closure(&self, src: SortId, len: usize) -> Arc<Closure> {
        if let Some(c) = self.oracle.lock().expect("oracle lock").get(&(src, len)) {
            return c.clone();
        }
        let q = &*self.quiver;
        let ctx = Context::single("z", src);
        let universe = Universe::build(q, &ctx, len, 4000);
        let mut cl = Closure::new(q, universe);
        instantiate_relations(q, &mut cl, &self.relations);
        cl.drain(q);
        let cl = Arc::new(cl);
        self.oracle.lock().expect("oracle lock").insert((src, len), cl.clone());
        cl
    }

    /// Whether the arrow vanishes modulo the relations.
    pub fn vanishes(&self, a: &Arrow) -> bool {
        if a.is_zero() {
            return true;
        }
        let cl = self.relation_closure(a.src, a.len() + 1);
        match self.vanishes_in(&cl, a) {
            Some(true) => true,
            _ if cl.universe.truncated => self.vanishes_in(&self.guided_closure(a), a) == Some(true),
            other => other == Some(true),
        }
    }

    /// `None` when the arrow leaves the closure's universe.
    fn vanishes_in(&self, cl: &Closure, a: &Arrow) -> Option<bool> {
        let z = cl.universe.get(&Monomial::new(Atom::Var(0), Vec::new())).expect("variable is in its universe");
        let sparse = cl.universe.arrow_at(&self.quiver, a, z)?;
        let mut v = vec![Q::zero(); cl.universe.sort_size(a.tgt)];
        for (i, c) in sparse {
            v[i] = c;
        }
        Some(cl.contains(a.tgt, &v))
    }

    /// A relations-only closure over the capped universe plus every prefix
    /// of the arrow's paths, for arrows longer than the full layers.
    fn guided_closure(&self, a: &Arrow) -> Closure {
        let q = &*self.quiver;
        let ctx = Context::single("z", a.src);
        let prefixes: Vec<Monomial> =
            a.terms.keys().flat_map(|p| (1..=p.len()).map(|k| Monomial::new(Atom::Var(0), p[..k].to_vec()))).collect();
        let universe = Universe::build(q, &ctx, a.len() + 1, 4000).with_extra(q, prefixes);
        let mut cl = Closure::new(q, universe);
        instantiate_relations(q, &mut cl, &self.relations);
        cl.drain(q);
        cl
    }

    /// Single-variable axioms as rules, closed axioms as given facts.
    fn axiom_rules(&self) -> Vec<Rule> {
        let mut out = Vec::new();
        for (index, ax) in self.axioms.iter().enumerate() {
            if ax.context.len() != 1 || ax.has_diers() {
                continue;
            }
            let Conclusion::Eq(t) = &ax.conclusion else { continue };
            let Some(conclusion) = Arrow::from_term(t) else { continue };
            let Some(premises) = ax.live_premises().map(Arrow::from_term).collect::<Option<Vec<_>>>() else {
                continue;
            };
            out.push(Rule { kind: RuleKind::Axiom { index }, src: ax.context.sort(0), premises, conclusion, side: Vec::new() });
        }
        out
    }

    /// All rules with arrows of length at most `depth`.
    pub fn rules(&self, depth: usize) -> Arc<RuleSet> {
        if let Some(r) = self.rule_cache.lock().expect("rule lock").get(&depth) {
            return r.clone();
        }
        let mut set = RuleSet::default();
        let mut index = BTreeMap::new();
        for r in self.axiom_rules() {
            set.push(&mut index, r);
        }
        if self.exactness {
            for r in self.exactness_rules(depth) {
                set.push(&mut index, r);
            }
        }
        let set = Arc::new(set);
        self.rule_cache.lock().expect("rule lock").insert(depth, set.clone());
        set
    }

    /// Arrows out of `src` of length `<= depth`, identity included.
    fn arrows_from(&self, src: SortId, depth: usize) -> Vec<Arrow> {
        let q = &*self.quiver;
        let mut out = vec![Arrow::identity(src)];
        out.extend(paths_from(q, src, depth).into_iter().map(|(t, p)| Arrow::path(src, t, p)));
        out
    }

    /// Single paths `s` out of `tgt f` with `s o f = 0`, then a completion of
    /// the kernel by differences of paths.
    pub fn annihilators(&self, pair: usize, depth: usize) -> (Vec<Arrow>, Vec<Arrow>) {
        let q = &*self.quiver;
        let (f, _) = q.pairs()[pair];
        let fa = Arrow::edge(q, f);
        let d = q.edge(f).tgt;
        let candidates = self.arrows_from(d, depth);
        let singles: Vec<Arrow> = candidates.iter().filter(|s| self.vanishes(&fa.then(q, s))).cloned().collect();
        let mut combos = Vec::new();
        let mut by_target: BTreeMap<SortId, Vec<&Arrow>> = BTreeMap::new();
        for s in &candidates {
            by_target.entry(s.tgt).or_default().push(s);
        }
        let cl = self.relation_closure(fa.src, depth + 2);
        let z = cl.universe.get(&Monomial::new(Atom::Var(0), Vec::new())).expect("variable is present");
        for (tgt, group) in by_target {
            if group.len() < 2 {
                continue;
            }
            let n = cl.universe.sort_size(tgt);
            let mut cols = Vec::new();
            for s in &group {
                let Some(sparse) = cl.universe.arrow_at(q, &fa.then(q, s), z) else {
                    cols.clear();
                    break;
                };
                let mut v = vec![Q::zero(); n];
                for (i, c) in sparse {
                    v[i] = c;
                }
                cols.push(cl.spaces[tgt.0].reduce(&v));
            }
            if cols.len() != group.len() {
                continue;
            }
            for k in Matrix::from_cols(&cols, n).kernel() {
                if k.iter().filter(|x| !x.is_zero()).count() < 2 {
                    continue;
                }
                let mut a = Arrow::zero(d, tgt);
                for (s, c) in group.iter().zip(&k) {
                    a = a.add(&s.scale(c));
                }
                combos.push(a);
            }
        }
        (singles, combos)
    }

    fn exactness_rules(&self, depth: usize) -> Vec<Rule> {
        let q = &*self.quiver;
        let mut out = Vec::new();
        let mut seen: BTreeSet<(Vec<Arrow>, Arrow)> = BTreeSet::new();
        let annihilators: Vec<(Vec<Arrow>, Vec<Arrow>)> = (0..q.pairs().len()).map(|i| self.annihilators(i, depth)).collect();
        for (pi, &(f, g)) in q.pairs().iter().enumerate() {
            let fa = Arrow::edge(q, f);
            let ga = Arrow::edge(q, g);
            let d = q.edge(f).tgt;
            let (singles, combos) = &annihilators[pi];
            for (s, kind) in singles
                .iter()
                .map(|s| (s, RuleKind::E2 { pair: pi }))
                .chain(combos.iter().map(|s| (s, RuleKind::E1 { pair: pi })))
            {
                if seen.insert((vec![ga.clone()], s.clone())) {
                    out.push(Rule { kind, src: d, premises: vec![ga.clone()], conclusion: s.clone(), side: vec![fa.then(q, s)] });
                }
            }
        }
        // Two-pair scheme with single-path witnesses.
        for (oi, &(f0, g0)) in q.pairs().iter().enumerate() {
            let f0a = Arrow::edge(q, f0);
            let g0a = Arrow::edge(q, g0);
            let (c0, d0) = (q.edge(f0).src, q.edge(f0).tgt);
            let from_d0 = self.arrows_from(d0, depth);
            let from_c0 = self.arrows_from(c0, depth);
            for (ii, &(f, g)) in q.pairs().iter().enumerate() {
                let fa = Arrow::edge(q, f);
                let ga = Arrow::edge(q, g);
                let (d, e) = (q.edge(f).tgt, q.edge(g).tgt);
                let chis: Vec<&Arrow> = from_d0.iter().filter(|a| a.tgt == d).collect();
                if chis.is_empty() {
                    continue;
                }
                let mut ps: Vec<Arrow> = from_c0.iter().filter(|a| a.tgt == d).cloned().collect();
                ps.push(Arrow::zero(c0, d));
                let mut ts: Vec<Arrow> = from_d0.iter().filter(|a| a.tgt == e).cloned().collect();
                ts.push(Arrow::zero(d0, e));
                let hs: Vec<&Arrow> = annihilators[ii].0.iter().filter(|h| !h.terms.contains_key(&Vec::new())).collect();
                for p in &ps {
                    let gp = p.then(q, &ga);
                    let tlist: Vec<&Arrow> = ts.iter().filter(|t| self.vanishes(&gp.sub(&f0a.then(q, t)))).collect();
                    if tlist.is_empty() {
                        continue;
                    }
                    for h in &hs {
                        let hp = p.then(q, h);
                        let mut t2s: Vec<Arrow> = from_d0.iter().filter(|a| a.tgt == h.tgt).cloned().collect();
                        t2s.push(Arrow::zero(d0, h.tgt));
                        let t2list: Vec<&Arrow> = t2s.iter().filter(|t2| self.vanishes(&hp.sub(&f0a.then(q, t2)))).collect();
                        for chi in &chis {
                            if chi.len() + h.len() > depth {
                                continue;
                            }
                            let gchi = chi.then(q, &ga);
                            let hchi = chi.then(q, h);
                            for t in &tlist {
                                let prem = vec![g0a.clone(), gchi.sub(t)];
                                for t2 in &t2list {
                                    let concl = hchi.sub(t2);
                                    if concl.is_zero() || !seen.insert((prem.clone(), concl.clone())) {
                                        continue;
                                    }
                                    out.push(Rule {
                                        kind: RuleKind::E3 {
                                            outer: oi,
                                            inner: ii,
                                            p: p.clone(),
                                            chi: (*chi).clone(),
                                            h: (*h).clone(),
                                            t: (*t).clone(),
                                            t2: (*t2).clone(),
                                        },
                                        src: d0,
                                        premises: prem.clone(),
                                        conclusion: concl,
                                        side: vec![fa.then(q, h), gp.sub(&f0a.then(q, t)), hp.sub(&f0a.then(q, t2))],
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Recomputes a rule from its kind and checks its side conditions.
    pub fn check_rule(&self, r: &Rule) -> Result<(), String> {
        let q = &*self.quiver;
        let expect = |ok: bool, what: &str| if ok { Ok(()) } else { Err(format!("{}: {what}", r.name())) };
        match &r.kind {
            RuleKind::E1 { pair } | RuleKind::E2 { pair } => {
                let &(f, g) = q.pairs().get(*pair).ok_or("unknown pair")?;
                expect(r.premises == vec![Arrow::edge(q, g)], "premise is not the second leg")?;
                expect(r.src == q.edge(f).tgt && r.conclusion.src == r.src, "sorts")?;
                expect(r.side == vec![Arrow::edge(q, f).then(q, &r.conclusion)], "side condition")?;
            }
            RuleKind::E3 { outer, inner, p, chi, h, t, t2 } => {
                let &(f0, g0) = q.pairs().get(*outer).ok_or("unknown pair")?;
                let &(f, g) = q.pairs().get(*inner).ok_or("unknown pair")?;
                let (f0a, g0a, fa, ga) = (Arrow::edge(q, f0), Arrow::edge(q, g0), Arrow::edge(q, f), Arrow::edge(q, g));
                expect(r.src == q.edge(f0).tgt, "sorts")?;
                expect(r.premises == vec![g0a, chi.then(q, &ga).sub(t)], "premises")?;
                expect(r.conclusion == chi.then(q, h).sub(t2), "conclusion")?;
                let side = vec![fa.then(q, h), p.then(q, &ga).sub(&f0a.then(q, t)), p.then(q, h).sub(&f0a.then(q, t2))];
                expect(r.side == side, "side conditions")?;
            }
            RuleKind::Axiom { index } => {
                let ax = self.axioms.get(*index).ok_or("unknown axiom")?;
                let Conclusion::Eq(t) = &ax.conclusion else { return Err("axiom conclusion".into()) };
                expect(Arrow::from_term(t).as_ref() == Some(&r.conclusion), "axiom conclusion")?;
                let prem: Option<Vec<Arrow>> = ax.live_premises().map(Arrow::from_term).collect();
                expect(prem.as_ref() == Some(&r.premises), "axiom premises")?;
            }
        }
        for a in &r.side {
            if !self.vanishes(a) {
                return Err(format!("{}: side condition {} does not vanish", r.name(), a.display(q, "y")));
            }
        }
        Ok(())
    }
}

/// Every relation at every monomial of its source sort.
pub fn instantiate_relations(q: &Quiver, cl: &mut Closure, relations: &[Relation]) {
    for (ri, r) in relations.iter().enumerate() {
        let ids = cl.universe.by_sort[r.arrow.src.0].clone();
        for m in ids {
            if let Some(sparse) = cl.universe.arrow_at(q, &r.arrow, m) {
                let mut v = vec![Q::zero(); cl.universe.sort_size(r.arrow.tgt)];
                for (i, c) in sparse {
                    v[i] = c;
                }
                cl.add(r.arrow.tgt, v, Justification::Relation { relation: ri, at: m });
            }
        }
    }
}
