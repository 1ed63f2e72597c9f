//! Fragment checks of the triangulated-category axioms, the quotient by
//! `g∘f = 0` along triangles, and isomorphic copies of triangles.

use std::collections::BTreeMap;

use rayon::prelude::*;
use sequent_engine::{Arrow, Relation};
use serde::Serialize;

use crate::classes::{show_arrow, ClassKind};
use crate::state::TriCatState;
use crate::triangles::{IsoWitness, Provenance, Triangle};
use crate::TricatError;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub checked: usize,
    pub passed: usize,
    /// Instances a cap or the degree floor kept from being formed.
    pub truncated: usize,
    pub failures: Vec<String>,
}

impl AxiomCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(failure());
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub level: usize,
    pub tr1: AxiomCheck,
    pub tr2: AxiomCheck,
    pub tr3: AxiomCheck,
    pub tr4: AxiomCheck,
    /// Pairs of cones joined by more than one filler. Not an error.
    pub nonunique_fillers: usize,
    pub isomorphism_witnesses: usize,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        [&self.tr1, &self.tr2, &self.tr3, &self.tr4].iter().all(|c| c.ok())
    }
}

/// Checks the four axioms on what `level` added. Level 0 carries only the
/// trivial triangles and has nothing to check.
pub fn verify_triangulated_axioms(state: &TriCatState, level: usize) -> AxiomReport {
    let mut report = AxiomReport { level, isomorphism_witnesses: state.registry.witnesses.len(), ..AxiomReport::default() };
    if level == 0 || level > state.level() {
        return report;
    }
    let q = state.quiver(state.level());
    let theory = state.theory(level);
    let below = level - 1;

    // TR1: every eligible class below has a cone and its canonical triangle.
    let capped = state.reports[level].capped_cones;
    for c in state.class_table(below).classes.iter() {
        let eligible = c.kind != ClassKind::Identity
            && c.rep.len() <= state.caps.term_depth
            && state.arrow_level(&c.rep) == below
            && state.shift_sort(c.src).is_some()
            && state.shift_sort(c.tgt).is_some();
        if !eligible {
            continue;
        }
        match state.cone(&c.key) {
            Some(cone) => {
                let arrows = [c.rep.clone(), Arrow::edge(&q, cone.pi), Arrow::edge(&q, cone.delta)];
                report.tr1.record(state.registry.find(&arrows).is_some(), || format!("no canonical triangle for {}", c.key));
            }
            None if capped > 0 => report.tr1.truncated += 1,
            None => report.tr1.record(false, || format!("no cone for {}", c.key)),
        }
    }

    // TR2: rotations of registered triangles are registered.
    let triangles = state.registry.triangles();
    for t in triangles.iter().filter(|t| t.level <= level) {
        if matches!(t.provenance, Provenance::IsomorphicCopy { .. }) {
            continue;
        }
        match state.rotate(&t.arrows) {
            None => report.tr2.truncated += 1,
            Some(r) => {
                let found = state.registry.find(&r).is_some() || registered_up_to_equality(state, level, &r);
                report.tr2.record(found, || {
                    let missing = Triangle { arrows: r.clone(), provenance: Provenance::Rotation { of: 0 }, level };
                    format!("rotation of {} is missing: {}", t.display(&q), missing.display(&q))
                });
            }
        }
    }

    // TR3: fillers exist and both of their squares are provable.
    let squares: Vec<_> = state.squares.iter().filter(|s| s.level == level).collect();
    let results: Vec<(bool, String)> = squares
        .par_iter()
        .map(|sq| {
            let (ct, ct2) = (&state.cones[sq.t], &state.cones[sq.t2]);
            let r = Arrow::edge(&q, sq.edge);
            let pi_square = Arrow::edge(&q, ct.pi).then(&q, &r).sub(&sq.z.rep.then(&q, &Arrow::edge(&q, ct2.pi)));
            let delta_square = state
                .shift(&sq.w.rep)
                .map(|tw| r.then(&q, &Arrow::edge(&q, ct2.delta)).sub(&Arrow::edge(&q, ct.delta).then(&q, &tw)));
            let ok = theory.vanishes(&pi_square) && delta_square.is_none_or(|a| theory.vanishes(&a));
            (ok, q.edge_name(sq.edge).to_string())
        })
        .collect();
    for (ok, name) in results {
        report.tr3.record(ok, || format!("filler {name} does not commute"));
    }
    let lr = &state.reports[level];
    report.tr3.checked += lr.zero_squares;
    report.tr3.passed += lr.zero_squares;
    report.tr3.truncated += lr.unprocessed_squares;
    let mut per_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for sq in &squares {
        *per_pair.entry((sq.t, sq.t2)).or_default() += 1;
    }
    report.nonunique_fillers = per_pair.values().filter(|&&n| n > 1).count();

    // TR4: every composable pair of new cones has its octahedron triangle.
    let new: Vec<usize> = (0..state.cones.len()).filter(|&i| state.cones[i].level == level).collect();
    for &iu in &new {
        for &iv in &new {
            if state.cones[iu].class.tgt != state.cones[iv].class.src {
                continue;
            }
            match state.octahedron(&q, iu, iv, below) {
                None => report.tr4.truncated += 1,
                Some(arrows) => report.tr4.record(state.registry.find(&arrows).is_some(), || {
                    format!("no octahedron for ({}, {})", state.cones[iu].class.key, state.cones[iv].class.key)
                }),
            }
        }
    }
    report
}

/// A registered triangle whose arrows are provably equal to `r`.
fn registered_up_to_equality(state: &TriCatState, level: usize, r: &[Arrow; 3]) -> bool {
    let theory = state.theory(level);
    let same_shape = |a: &Arrow, b: &Arrow| a.src == b.src && a.tgt == b.tgt;
    state.registry.triangles().iter().any(|t| {
        t.arrows.iter().zip(r).all(|(a, b)| same_shape(a, b)) && t.arrows.iter().zip(r).all(|(a, b)| theory.vanishes(&a.sub(b)))
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TPrimeReport {
    pub triangles: usize,
    pub composites: usize,
    pub proved: usize,
    pub failures: Vec<String>,
    /// `π_t∘t = 0` for each canonical triangle.
    pub equations: Vec<String>,
    /// The image of `t` cut out as the kernel of `π_t`.
    pub images: Vec<String>,
}

impl TriCatState {
    /// Adds `b∘a = 0` and `c∘b = 0` for every registered triangle and
    /// checks both composites in the new theory.
    pub fn quotient_tprime(&mut self) -> TPrimeReport {
        let q = self.quiver(self.level());
        if !self.tprime {
            let mut relations = Vec::new();
            for (i, t) in self.registry.triangles().iter().enumerate() {
                for (j, a) in t.composites(&q).into_iter().enumerate() {
                    if !a.is_zero() {
                        relations.push(Relation { label: format!("triangle {i} composite {j}"), arrow: a });
                    }
                }
            }
            self.add_top_relations(relations, true);
            self.tprime = true;
        }
        let theory = self.theory(self.level());
        let triangles = self.registry.triangles();
        let results: Vec<(usize, Vec<String>)> = triangles
            .par_iter()
            .map(|t| {
                let failed: Vec<String> = t
                    .composites(&q)
                    .iter()
                    .filter(|a| !theory.vanishes(a))
                    .map(|a| format!("{} in {}", show_arrow(&q, a), t.display(&q)))
                    .collect();
                (2 - failed.len(), failed)
            })
            .collect();
        let mut report = TPrimeReport { triangles: triangles.len(), composites: 2 * triangles.len(), ..TPrimeReport::default() };
        for (proved, failed) in results {
            report.proved += proved;
            report.failures.extend(failed);
        }
        for t in triangles {
            if let Provenance::Canonical { class } = &t.provenance {
                let [ba, _] = t.composites(&q);
                let pi = show_arrow(&q, &t.arrows[1]);
                report.equations.push(format!("{} = 0", show_arrow(&q, &ba)));
                report.images.push(format!("im {class} = {{y : {pi}(y) = 0}}"));
            }
        }
        report
    }

    /// Registers `target` as isomorphic to triangle `of` via `isos`, with
    /// `inverses` as two-sided inverses. Returns the witness index.
    pub fn register_isomorphic_copy(
        &mut self,
        of: usize,
        target: [Arrow; 3],
        isos: [Arrow; 3],
        inverses: [Arrow; 3],
    ) -> Result<usize, TricatError> {
        let q = self.quiver(self.level());
        let theory = self.theory(self.level());
        let source = self.registry.triangles().get(of).ok_or_else(|| TricatError::Isomorphism(format!("no triangle {of}")))?;
        let [a, b, c] = &source.arrows;
        let [a2, b2, c2] = &target;
        let vertices = [(a.src, a2.src), (b.src, b2.src), (c.src, c2.src)];
        for (i, (phi, (s, t))) in isos.iter().zip(vertices).enumerate() {
            if phi.src != s || phi.tgt != t || inverses[i].src != t || inverses[i].tgt != s {
                return Err(TricatError::Isomorphism(format!("vertex {i} has the wrong shape")));
            }
            let left = phi.then(&q, &inverses[i]).sub(&Arrow::identity(s));
            let right = inverses[i].then(&q, phi).sub(&Arrow::identity(t));
            if !theory.vanishes(&left) || !theory.vanishes(&right) {
                return Err(TricatError::Isomorphism(format!("vertex {i} is not invertible")));
            }
        }
        let t0 = self.shift(&isos[0]).ok_or_else(|| TricatError::Isomorphism("first iso does not translate".into()))?;
        let squares = [
            a.then(&q, &isos[1]).sub(&isos[0].then(&q, a2)),
            b.then(&q, &isos[2]).sub(&isos[1].then(&q, b2)),
            c.then(&q, &t0).sub(&isos[2].then(&q, c2)),
        ];
        if let Some(i) = squares.iter().position(|s| !theory.vanishes(s)) {
            return Err(TricatError::Isomorphism(format!("square {i} does not commute")));
        }
        let level = self.level();
        let (to, _) = self.registry.insert(Triangle { arrows: target, provenance: Provenance::IsomorphicCopy { of }, level });
        self.registry.witnesses.push(IsoWitness { from: of, to, isos });
        Ok(self.registry.witnesses.len() - 1)
    }
}
