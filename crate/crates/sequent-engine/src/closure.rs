//! The bounded term universe and the space of provably vanishing terms over it.
//!
//! Terms of a fixed context are vectors over the monomials of the universe.
//! For each sort the provable terms form a subspace, kept in echelon form. Each
//! echelon row remembers which facts it is a combination of, so that any member
//! of the subspace can be expressed through the facts that produced it.

use std::collections::{BTreeMap, HashMap, VecDeque};

use quiver_core::{Atom, Context, EdgeId, Field, Monomial, Quiver, SortId, Term, Q};

use crate::arrow::Arrow;

pub type Sparse = Vec<(usize, Q)>;
pub type Combo = BTreeMap<usize, Q>;

/// Monomials over a context up to a raw path length.
#[derive(Clone, Debug)]
pub struct Universe {
    pub context: Context,
    pub monos: Vec<Monomial>,
    pub sort_of: Vec<SortId>,
    /// Position of a monomial among those of its sort.
    pub local: Vec<usize>,
    pub by_sort: Vec<Vec<usize>>,
    /// `succ[m]` lists `(edge, m.then(edge))` for representable successors.
    pub succ: Vec<Vec<(EdgeId, usize)>>,
    index: HashMap<Monomial, usize>,
    pub layers: usize,
    pub truncated: bool,
}

impl Universe {
    /// Layers are added whole; a layer that would exceed `cap` is dropped and
    /// the universe is marked truncated.
    pub fn build(q: &Quiver, context: &Context, max_len: usize, cap: usize) -> Universe {
        let mut u = Universe {
            context: context.clone(),
            monos: Vec::new(),
            sort_of: Vec::new(),
            local: Vec::new(),
            by_sort: vec![Vec::new(); q.sorts().len()],
            succ: Vec::new(),
            index: HashMap::new(),
            layers: 0,
            truncated: false,
        };
        let mut layer: Vec<Monomial> = std::iter::once(Monomial::new(Atom::Unit, Vec::new()))
            .chain((0..context.len()).map(|i| Monomial::new(Atom::Var(i), Vec::new())))
            .collect();
        for m in &layer {
            u.push(q, m.clone());
        }
        for _ in 0..max_len {
            let mut next = Vec::new();
            let mut fresh = std::collections::HashSet::new();
            for m in &layer {
                let s = m.target(q, context);
                for e in q.edges_from(s) {
                    if q.edge(e).is_identity() {
                        continue;
                    }
                    let n = m.then(q, &[e]);
                    if !u.index.contains_key(&n) && fresh.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            if u.monos.len() + next.len() > cap {
                u.truncated = true;
                break;
            }
            for m in &next {
                u.push(q, m.clone());
            }
            u.layers += 1;
            layer = next;
        }
        u.link(q);
        u
    }

    fn link(&mut self, q: &Quiver) {
        self.succ = (0..self.monos.len())
            .map(|i| {
                let s = self.sort_of[i];
                q.edges_from(s).filter_map(|e| self.index.get(&self.monos[i].then(q, &[e])).map(|&j| (e, j))).collect()
            })
            .collect();
    }

    /// Adds monomials beyond the layers, ignoring the cap.
    pub fn with_extra(mut self, q: &Quiver, extra: impl IntoIterator<Item = Monomial>) -> Universe {
        for m in extra {
            if !self.index.contains_key(&m) {
                self.push(q, m);
            }
        }
        self.link(q);
        self
    }

    fn push(&mut self, q: &Quiver, m: Monomial) {
        let s = m.target(q, &self.context);
        let id = self.monos.len();
        self.index.insert(m.clone(), id);
        self.local.push(self.by_sort[s.0].len());
        self.by_sort[s.0].push(id);
        self.sort_of.push(s);
        self.monos.push(m);
    }

    pub fn get(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn sort_size(&self, s: SortId) -> usize {
        self.by_sort[s.0].len()
    }

    pub fn mono_local(&self, s: SortId, local: usize) -> &Monomial {
        &self.monos[self.by_sort[s.0][local]]
    }

    /// A term as a dense vector over its sort, if every monomial is present.
    pub fn vector(&self, t: &Term) -> Option<Vec<Q>> {
        let s = t.target();
        let mut v = vec![Q::zero(); self.sort_size(s)];
        for (m, c) in t.body() {
            let id = self.get(m)?;
            v[self.local[id]] = c.clone();
        }
        Some(v)
    }

    pub fn term(&self, q: &Quiver, s: SortId, v: &[Q]) -> Term {
        let _ = q;
        Term::from_monomials(
            self.context.clone(),
            s,
            v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (self.mono_local(s, i).clone(), c.clone())),
        )
    }

    /// `a(m)` as a sparse local vector in the target sort.
    pub fn arrow_at(&self, q: &Quiver, a: &Arrow, m: usize) -> Option<Sparse> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (mono, c) in a.after_monomial(q, &self.monos[m]) {
            let id = self.get(&mono)?;
            let slot = acc.entry(self.local[id]).or_insert_with(Q::zero);
            *slot = slot.plus(&c);
        }
        Some(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// `a(v)` for a dense vector `v` over `a.src`.
    pub fn arrow_vec(&self, q: &Quiver, a: &Arrow, v: &[Q]) -> Option<Vec<Q>> {
        let mut out = vec![Q::zero(); self.sort_size(a.tgt)];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, x) in self.arrow_at(q, a, self.by_sort[a.src.0][i])? {
                out[j] = out[j].plus(&c.times(&x));
            }
        }
        Some(out)
    }
}

#[derive(Clone, Debug)]
struct Row {
    pivot: usize,
    vec: Vec<Q>,
    combo: Combo,
}

/// Echelon rows sorted by pivot; each row vanishes before its pivot and has a
/// unit pivot entry.
#[derive(Clone, Debug, Default)]
pub struct SortSpace {
    rows: Vec<Row>,
}

impl SortSpace {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        let mut v = v.to_vec();
        for row in &self.rows {
            let c = v[row.pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(&row.vec).skip(row.pivot) {
                if !r.is_zero() {
                    *x = x.minus(&c.times(r));
                }
            }
        }
        v
    }

    /// Residual and the fact combination `v - residual`.
    pub fn reduce_with_combo(&self, v: &[Q]) -> (Vec<Q>, Combo) {
        let mut v = v.to_vec();
        let mut used = Combo::new();
        for row in &self.rows {
            let c = v[row.pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(&row.vec).skip(row.pivot) {
                if !r.is_zero() {
                    *x = x.minus(&c.times(r));
                }
            }
            add_combo(&mut used, &row.combo, &c);
        }
        (v, used)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Inserts `v`, the vector of fact `fact`; `false` if already spanned.
    fn insert(&mut self, v: &[Q], fact: usize) -> bool {
        let (mut r, used) = self.reduce_with_combo(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inverse();
        for x in r.iter_mut() {
            *x = x.times(&inv);
        }
        let mut combo = Combo::new();
        combo.insert(fact, Q::one());
        add_combo(&mut combo, &used, &Q::from_i64(-1));
        let combo = combo.into_iter().map(|(k, c)| (k, c.times(&inv))).filter(|(_, c)| !c.is_zero()).collect();
        let at = self.rows.partition_point(|row| row.pivot < p);
        self.rows.insert(at, Row { pivot: p, vec: r, combo });
        true
    }
}

pub fn add_combo(acc: &mut Combo, other: &Combo, c: &Q) {
    for (k, x) in other {
        let vanished = {
            let slot = acc.entry(*k).or_insert_with(Q::zero);
            *slot = slot.plus(&c.times(x));
            slot.is_zero()
        };
        if vanished {
            acc.remove(k);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Justification {
    Premise(usize),
    /// A closed axiom from the theory.
    Given(usize),
    /// Relation instantiated at a universe monomial.
    Relation {
        relation: usize,
        at: usize,
    },
    Subst {
        parent: usize,
        edge: EdgeId,
    },
    /// A conditional rule at the term `u` (dense over the rule's source sort);
    /// `premises[j]` expresses premise `j` applied to `u` through earlier facts.
    Rule {
        rule: usize,
        u: Vec<Q>,
        premises: Vec<Combo>,
    },
}

#[derive(Clone, Debug)]
pub struct Fact {
    pub sort: SortId,
    pub vec: Vec<Q>,
    pub just: Justification,
}

/// The provable subspaces together with the facts that generate them.
#[derive(Clone, Debug)]
pub struct Closure {
    pub universe: Universe,
    pub spaces: Vec<SortSpace>,
    pub facts: Vec<Fact>,
    queue: VecDeque<usize>,
}

impl Closure {
    pub fn new(q: &Quiver, universe: Universe) -> Closure {
        Closure { universe, spaces: vec![SortSpace::default(); q.sorts().len()], facts: Vec::new(), queue: VecDeque::new() }
    }

    pub fn contains(&self, s: SortId, v: &[Q]) -> bool {
        self.spaces[s.0].contains(v)
    }

    /// Records a fact if it is not already provable.
    pub fn add(&mut self, sort: SortId, vec: Vec<Q>, just: Justification) -> Option<usize> {
        let id = self.facts.len();
        if !self.spaces[sort.0].insert(&vec, id) {
            return None;
        }
        self.facts.push(Fact { sort, vec, just });
        self.queue.push_back(id);
        Some(id)
    }

    /// Post-composes queued facts with every edge until nothing new appears.
    pub fn drain(&mut self, q: &Quiver) {
        while let Some(id) = self.queue.pop_front() {
            let sort = self.facts[id].sort;
            let nz: Vec<(usize, Q)> =
                self.facts[id].vec.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect();
            for e in q.edges_from(sort) {
                if q.edge(e).is_identity() {
                    continue;
                }
                let tgt = q.edge(e).tgt;
                let mut v = vec![Q::zero(); self.universe.sort_size(tgt)];
                let mut representable = true;
                for (i, c) in &nz {
                    let g = self.universe.by_sort[sort.0][*i];
                    match self.universe.succ[g].iter().find(|(x, _)| *x == e) {
                        Some(&(_, j)) => {
                            let l = self.universe.local[j];
                            v[l] = v[l].plus(c);
                        }
                        None => {
                            representable = false;
                            break;
                        }
                    }
                }
                if representable {
                    self.add(tgt, v, Justification::Subst { parent: id, edge: e });
                }
            }
        }
    }

    /// `v` as a combination of facts, when provable.
    pub fn explain(&self, s: SortId, v: &[Q]) -> Option<Combo> {
        let (r, used) = self.spaces[s.0].reduce_with_combo(v);
        r.iter().all(|x| x.is_zero()).then_some(used)
    }
}
