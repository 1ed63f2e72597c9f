//! Finite sets with injections.

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::category::{Amalgamation, Extension, FiniteStructureCategory, Problem, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteSet {
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Injection {
    pub src: usize,
    pub map: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FiniteSets;

fn random_injection<R: Rng>(src: usize, dst: usize, rng: &mut R) -> Injection {
    let mut all: Vec<usize> = (0..dst).collect();
    all.shuffle(rng);
    Injection { src, map: all[..src].to_vec() }
}

impl FiniteStructureCategory for FiniteSets {
    type Object = FiniteSet;
    type Arrow = Injection;

    fn name(&self) -> &'static str {
        "sets"
    }

    fn initial(&self) -> Option<FiniteSet> {
        Some(FiniteSet { size: 0 })
    }

    fn from_initial(&self, _a: &FiniteSet) -> Option<Injection> {
        Some(Injection { src: 0, map: Vec::new() })
    }

    fn identity(&self, a: &FiniteSet) -> Injection {
        Injection { src: a.size, map: (0..a.size).collect() }
    }

    fn compose(&self, f: &Injection, g: &Injection) -> Injection {
        Injection { src: f.src, map: f.map.iter().map(|&i| g.map[i]).collect() }
    }

    fn is_arrow(&self, f: &Injection, src: &FiniteSet, dst: &FiniteSet) -> bool {
        let mut seen = vec![false; dst.size];
        f.src == src.size
            && f.map.len() == src.size
            && f.map.iter().all(|&i| i < dst.size && !std::mem::replace(&mut seen[i], true))
    }

    fn sample_object<R: Rng>(&self, rng: &mut R) -> FiniteSet {
        FiniteSet { size: rng.gen_range(0..=4) }
    }

    fn sample_arrow_from<R: Rng>(&self, a: &FiniteSet, rng: &mut R) -> (FiniteSet, Injection) {
        let b = FiniteSet { size: a.size + rng.gen_range(0..=2) };
        (b, random_injection(a.size, b.size, rng))
    }

    fn sample_arrow_into<R: Rng>(&self, u: &FiniteSet, rng: &mut R) -> (FiniteSet, Injection) {
        let a = FiniteSet { size: rng.gen_range(0..=u.size.min(3)) };
        (a, random_injection(a.size, u.size, rng))
    }

    /// `b` followed by the points of `c` outside the image of `a`.
    fn amalgamate(&self, s: &Span<Self>) -> Amalgamation<Self> {
        let mut g2 = vec![usize::MAX; s.c.size];
        for (i, &y) in s.g.map.iter().enumerate() {
            g2[y] = s.f.map[i];
        }
        let mut next = s.b.size;
        for x in g2.iter_mut().filter(|x| **x == usize::MAX) {
            *x = next;
            next += 1;
        }
        Amalgamation::Amalgamated {
            d: FiniteSet { size: next },
            f2: self.identity(&s.b),
            g2: Injection { src: s.c.size, map: g2 },
            certificate: json!("union over the shared part"),
        }
    }

    fn extend(&self, p: &Problem<Self>, u: &FiniteSet) -> Extension<Injection> {
        let mut map = vec![usize::MAX; p.b.size];
        let mut used = vec![false; u.size];
        for (i, &y) in p.j.map.iter().enumerate() {
            map[y] = p.chi.map[i];
            used[p.chi.map[i]] = true;
        }
        let mut free = (0..u.size).filter(|&k| !used[k]);
        for x in map.iter_mut().filter(|x| **x == usize::MAX) {
            match free.next() {
                Some(k) => *x = k,
                None => {
                    return Extension::Failed(json!({ "needed": p.b.size - p.a.size, "available": u.size - p.a.size }));
                }
            }
        }
        Extension::Extended(Injection { src: p.b.size, map })
    }

    /// Add one new point.
    fn growth_problems(&self, u: &FiniteSet) -> Vec<Problem<Self>> {
        let b = FiniteSet { size: u.size + 1 };
        vec![Problem { a: *u, b, j: self.identity(u), chi: self.identity(u) }]
    }

    fn object_json(&self, a: &FiniteSet) -> Value {
        json!({ "size": a.size })
    }

    fn arrow_json(&self, f: &Injection) -> Value {
        json!({ "src": f.src, "map": f.map })
    }
}
