//! The registry of distinguished triangles.

use std::collections::HashMap;

use quiver_core::Quiver;
use sequent_engine::Arrow;
use serde::Serialize;

use crate::classes::show_arrow;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    /// `(id, 0, 0)` on a sort.
    Trivial {
        sort: String,
    },
    /// `(t, π_t, δ_t)` for the class keyed `class`.
    Canonical {
        class: String,
    },
    Rotation {
        of: usize,
    },
    Translation {
        of: usize,
    },
    Octahedron {
        u: String,
        v: String,
    },
    IsomorphicCopy {
        of: usize,
    },
}

/// `a: A -> B`, `b: B -> C`, `c: C -> T1(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triangle {
    pub arrows: [Arrow; 3],
    pub provenance: Provenance,
    pub level: usize,
}

impl Triangle {
    pub fn display(&self, q: &Quiver) -> String {
        let [a, b, c] = &self.arrows;
        format!("({}, {}, {})", show_arrow(q, a), show_arrow(q, b), show_arrow(q, c))
    }

    /// The two consecutive composites `b∘a` and `c∘b`.
    pub fn composites(&self, q: &Quiver) -> [Arrow; 2] {
        let [a, b, c] = &self.arrows;
        [a.then(q, b), b.then(q, c)]
    }
}

/// An accepted isomorphism of triangles, `isos[i]` mapping the `i`-th vertex
/// of `from` to that of `to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoWitness {
    pub from: usize,
    pub to: usize,
    pub isos: [Arrow; 3],
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    triangles: Vec<Triangle>,
    index: HashMap<[Arrow; 3], usize>,
    pub witnesses: Vec<IsoWitness>,
}

impl Registry {
    /// Position of the triangle and whether it was new.
    pub fn insert(&mut self, t: Triangle) -> (usize, bool) {
        if let Some(&i) = self.index.get(&t.arrows) {
            return (i, false);
        }
        let i = self.triangles.len();
        self.index.insert(t.arrows.clone(), i);
        self.triangles.push(t);
        (i, true)
    }

    pub fn find(&self, arrows: &[Arrow; 3]) -> Option<usize> {
        self.index.get(arrows).copied()
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Drops a triangle and any witness touching it. Meant for fault
    /// injection; provenance indices of later triangles are left as they are.
    pub fn remove(&mut self, i: usize) -> Triangle {
        let t = self.triangles.remove(i);
        self.index = self.triangles.iter().enumerate().map(|(j, t)| (t.arrows.clone(), j)).collect();
        self.witnesses.retain(|w| w.from != i && w.to != i);
        t
    }
}
