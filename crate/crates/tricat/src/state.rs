//! Signatures and theories level by level.
//!
//! Sort and edge ids are stable across levels: each level's quiver extends
//! the previous one, so arrows of level `l` are valid at every later level.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use quiver_core::{normalize_path, EdgeId, EdgeKind, Quiver, SortId, SortKind, StructuralKind, Q};
use rayon::prelude::*;
use sequent_engine::{Arrow, Relation, Theory};
use serde::{Deserialize, Serialize};

use crate::classes::{classes_over, show_arrow, ClassKind, TermClass};
use crate::triangles::{Provenance, Registry, Triangle};
use crate::TricatError;

pub const ZERO_OBJECT: &str = "0";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

/// Schemes and morphisms between them, graded over `degrees.0..=degrees.1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeGraph {
    pub schemes: Vec<String>,
    pub morphisms: Vec<Morphism>,
    pub degrees: (i32, i32),
}

impl SchemeGraph {
    /// Schemes are the vertices of graded sorts, morphisms the labels of
    /// functorial edges between them.
    pub fn from_quiver(q: &Quiver) -> Result<SchemeGraph, TricatError> {
        let degrees = q.degrees().ok_or(TricatError::NoDegrees)?;
        let vertex = |s: SortId| match &q.sort(s).kind {
            SortKind::Graded { vertex, .. } => Some(vertex.clone()),
            _ => None,
        };
        let mut schemes: Vec<String> = Vec::new();
        for s in q.sort_ids() {
            if let Some(v) = vertex(s) {
                if !schemes.contains(&v) {
                    schemes.push(v);
                }
            }
        }
        let mut morphisms: Vec<Morphism> = Vec::new();
        for e in q.edges() {
            let EdgeKind::Functorial { label } = &e.kind else { continue };
            let (Some(src), Some(tgt)) = (vertex(e.src), vertex(e.tgt)) else { continue };
            if label != "id" && !morphisms.iter().any(|m| &m.name == label) {
                morphisms.push(Morphism { name: label.clone(), src, tgt });
            }
        }
        Ok(SchemeGraph { schemes, morphisms, degrees })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// New cone sorts per level.
    pub cones: usize,
    /// Longest arrow that gets a cone.
    pub term_depth: usize,
    /// Longest side of a searched commuting square.
    pub square_depth: usize,
    /// New connecting maps per level.
    pub squares: usize,
    pub triangles: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { cones: 64, term_depth: 2, square_depth: 3, squares: 4096, triangles: 20_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Symbol {
    Shift {
        morphism: String,
        degree: i32,
    },
    Zero,
    /// `π_t` of the cone with this index.
    Projection {
        cone: usize,
    },
    /// `δ_t`.
    Connecting {
        cone: usize,
    },
    /// `R_(t, t', w, z)` of the square with this index.
    Filler {
        square: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SortDecl {
    pub name: String,
    pub kind: SortKind,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeDecl {
    pub name: String,
    pub src: SortId,
    pub tgt: SortId,
    pub symbol: Symbol,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationDecl {
    pub level: usize,
    pub relation: Relation,
    /// One of the `g∘f = 0` equations of the quotient.
    pub tprime: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cone {
    pub class: TermClass,
    pub level: usize,
    pub sort: SortId,
    pub pi: EdgeId,
    pub delta: EdgeId,
}

/// `z∘t = t'∘w` with fillers `R: R_t -> R_t'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Square {
    pub t: usize,
    pub t2: usize,
    pub w: TermClass,
    pub z: TermClass,
    pub level: usize,
    pub edge: EdgeId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub new_sorts: usize,
    pub new_symbols: usize,
    pub new_relations: usize,
    pub eligible: usize,
    /// Eligible classes left without a cone by the cap.
    pub capped_cones: usize,
    pub squares: usize,
    /// Squares with both sides zero; their filler is the zero map.
    pub zero_squares: usize,
    /// Commuting squares left without a filler by the cap.
    pub unprocessed_squares: usize,
    /// Squares whose `δ` naturality needs an untranslatable side.
    pub untranslated_naturality: usize,
    /// Composites of squares whose composite square has no symbol.
    pub composites_missing: usize,
    pub composable_pairs: usize,
    pub octahedra: usize,
    pub octahedra_truncated: usize,
    pub triangles: usize,
    pub triangles_capped: bool,
}

impl LevelReport {
    /// Some cap cut the level short.
    pub fn truncated(&self) -> bool {
        self.capped_cones > 0 || self.unprocessed_squares > 0 || self.triangles_capped
    }
}

/// Classes of one level, indexed by representative and by endpoints.
#[derive(Clone, Debug)]
pub struct ClassTable {
    pub classes: Vec<TermClass>,
    by_rep: HashMap<Arrow, usize>,
    by_pair: HashMap<(SortId, SortId), Vec<usize>>,
}

impl ClassTable {
    fn new(classes: Vec<TermClass>) -> ClassTable {
        let mut by_rep = HashMap::new();
        let mut by_pair: HashMap<(SortId, SortId), Vec<usize>> = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            by_rep.entry(c.rep.clone()).or_insert(i);
            by_pair.entry((c.src, c.tgt)).or_default().push(i);
        }
        ClassTable { classes, by_rep, by_pair }
    }

    pub fn between(&self, src: SortId, tgt: SortId) -> impl Iterator<Item = &TermClass> {
        self.by_pair.get(&(src, tgt)).into_iter().flatten().map(|&i| &self.classes[i])
    }
}

#[derive(Clone, Debug)]
struct LevelData {
    quiver: Arc<Quiver>,
    theory: Arc<Theory>,
    classes: OnceLock<Arc<ClassTable>>,
}

#[derive(Clone, Debug)]
pub struct TriCatState {
    pub input: SchemeGraph,
    pub caps: Caps,
    sorts: Vec<SortDecl>,
    edges: Vec<EdgeDecl>,
    relations: Vec<RelationDecl>,
    pub cones: Vec<Cone>,
    pub squares: Vec<Square>,
    pub registry: Registry,
    pub reports: Vec<LevelReport>,
    pub tprime: bool,
    levels: Vec<LevelData>,
    shift_sorts: Vec<Option<SortId>>,
    shift_edges: Vec<Option<EdgeId>>,
    graded: HashMap<(String, i32), SortId>,
    shifts: HashMap<(String, i32), EdgeId>,
    zero_edges: HashMap<(SortId, SortId), EdgeId>,
    cone_index: HashMap<String, usize>,
    cone_by_sort: HashMap<SortId, usize>,
    square_index: HashMap<(usize, usize, String, String), usize>,
    zero_object: SortId,
}

fn edge_kind(symbol: &Symbol) -> EdgeKind {
    match symbol {
        Symbol::Shift { morphism, .. } => EdgeKind::Functorial { label: morphism.clone() },
        Symbol::Zero => EdgeKind::Structural { role: StructuralKind::Zero },
        _ => EdgeKind::Structural { role: StructuralKind::User },
    }
}

fn relation(label: String, arrow: Arrow) -> Relation {
    Relation { label, arrow }
}

/// Builds level 0: graded sorts, shifted morphisms, a zero object with zero
/// maps, and the trivial triangles `(id, 0, 0)`.
pub fn init_level0(input: &SchemeGraph, caps: Caps) -> Result<TriCatState, TricatError> {
    if input.schemes.is_empty() {
        return Err(TricatError::NoSchemes);
    }
    let (lo, hi) = input.degrees;
    if lo > hi || hi != 0 {
        return Err(TricatError::Degrees(lo, hi));
    }
    for m in &input.morphisms {
        for x in [&m.src, &m.tgt] {
            if !input.schemes.contains(x) {
                return Err(TricatError::UnknownScheme(m.name.clone(), x.clone()));
            }
        }
    }
    let mut st = TriCatState {
        input: input.clone(),
        caps,
        sorts: Vec::new(),
        edges: Vec::new(),
        relations: Vec::new(),
        cones: Vec::new(),
        squares: Vec::new(),
        registry: Registry::default(),
        reports: Vec::new(),
        tprime: false,
        levels: Vec::new(),
        shift_sorts: Vec::new(),
        shift_edges: Vec::new(),
        graded: HashMap::new(),
        shifts: HashMap::new(),
        zero_edges: HashMap::new(),
        cone_index: HashMap::new(),
        cone_by_sort: HashMap::new(),
        square_index: HashMap::new(),
        zero_object: SortId(0),
    };
    st.push_sort("K0".into(), SortKind::Coefficient, 0);
    let mut objects = Vec::new();
    for x in &input.schemes {
        for n in (lo..=hi).rev() {
            let s = st.push_sort(format!("({x},{n})"), SortKind::Graded { vertex: x.clone(), degree: n }, 0);
            st.graded.insert((x.clone(), n), s);
            objects.push(s);
        }
    }
    let o = st.push_sort(ZERO_OBJECT.into(), SortKind::ZeroObject, 0);
    st.zero_object = o;
    objects.push(o);
    for m in &input.morphisms {
        for n in (lo..=hi).rev() {
            let (s, t) = (st.graded[&(m.src.clone(), n)], st.graded[&(m.tgt.clone(), n)]);
            let e = st.push_edge(format!("({},{n})", m.name), s, t, Symbol::Shift { morphism: m.name.clone(), degree: n }, 0);
            st.shifts.insert((m.name.clone(), n), e);
        }
    }
    for &a in &objects {
        for &b in &objects {
            if a == o && b == o {
                continue;
            }
            let name = format!("0:{}→{}", st.sorts[a.0].name, st.sorts[b.0].name);
            let e = st.push_edge(name, a, b, Symbol::Zero, 0);
            st.zero_edges.insert((a, b), e);
        }
    }
    let q = Arc::new(st.build_quiver()?);
    let mut zero: Vec<(SortId, SortId, EdgeId)> = st.zero_edges.iter().map(|(&(a, b), &e)| (a, b, e)).collect();
    zero.sort();
    for (_, _, e) in zero {
        st.relations.push(RelationDecl {
            level: 0,
            relation: relation(format!("zero {}", q.edge_name(e)), Arrow::edge(&q, e)),
            tprime: false,
        });
    }
    st.relations.push(RelationDecl { level: 0, relation: relation("zero object".into(), Arrow::identity(o)), tprime: false });
    st.push_level(q);
    let q = st.quiver(0);
    for &a in objects.iter().filter(|&&a| a != o) {
        let Some(ta) = st.shift_sorts[a.0] else { continue };
        let arrows = [Arrow::identity(a), Arrow::edge(&q, st.zero_edges[&(a, o)]), Arrow::edge(&q, st.zero_edges[&(o, ta)])];
        st.registry.insert(Triangle { arrows, provenance: Provenance::Trivial { sort: q.sort_name(a).into() }, level: 0 });
    }
    st.reports.push(LevelReport {
        level: 0,
        new_sorts: st.sorts.len(),
        new_symbols: st.edges.len(),
        new_relations: st.relations.len(),
        triangles: st.registry.len(),
        ..LevelReport::default()
    });
    Ok(st)
}

/// `init_level0` followed by `level` extensions.
pub fn build(input: &SchemeGraph, caps: Caps, level: usize) -> Result<TriCatState, TricatError> {
    let mut st = init_level0(input, caps)?;
    for _ in 0..level {
        st.extend_level()?;
    }
    Ok(st)
}

impl TriCatState {
    fn push_sort(&mut self, name: String, kind: SortKind, level: usize) -> SortId {
        self.sorts.push(SortDecl { name, kind, level });
        SortId(self.sorts.len() - 1)
    }

    fn push_edge(&mut self, name: String, src: SortId, tgt: SortId, symbol: Symbol, level: usize) -> EdgeId {
        self.edges.push(EdgeDecl { name, src, tgt, symbol, level });
        EdgeId(self.edges.len() - 1)
    }

    fn build_quiver(&self) -> Result<Quiver, TricatError> {
        let mut b = Quiver::builder();
        b.degrees(self.input.degrees.0, self.input.degrees.1)?;
        for s in &self.sorts {
            b.sort(&s.name, s.kind.clone())?;
        }
        for e in &self.edges {
            b.edge_between(&e.name, e.src, e.tgt, edge_kind(&e.symbol))?;
        }
        Ok(b.build()?)
    }

    fn make_theory(&self, q: &Arc<Quiver>) -> Theory {
        Theory::equational(q.clone(), self.relations.iter().map(|r| r.relation.clone()).collect())
    }

    fn push_level(&mut self, q: Arc<Quiver>) {
        let theory = Arc::new(self.make_theory(&q));
        self.levels.push(LevelData { quiver: q, theory, classes: OnceLock::new() });
        self.recompute_shift();
    }

    /// The highest level built.
    pub fn level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn quiver(&self, level: usize) -> Arc<Quiver> {
        self.levels[level].quiver.clone()
    }

    pub fn theory(&self, level: usize) -> Arc<Theory> {
        self.levels[level].theory.clone()
    }

    pub fn sort_decls(&self) -> &[SortDecl] {
        &self.sorts
    }

    pub fn edge_decls(&self) -> &[EdgeDecl] {
        &self.edges
    }

    pub fn relations(&self) -> &[RelationDecl] {
        &self.relations
    }

    pub fn zero_object(&self) -> SortId {
        self.zero_object
    }

    pub fn sorts_at(&self, level: usize) -> impl Iterator<Item = SortId> + '_ {
        self.sorts.iter().enumerate().filter(move |(_, s)| s.level <= level).map(|(i, _)| SortId(i))
    }

    pub fn sort_level(&self, s: SortId) -> usize {
        self.sorts[s.0].level
    }

    pub fn graded_sort(&self, scheme: &str, degree: i32) -> Option<SortId> {
        self.graded.get(&(scheme.to_string(), degree)).copied()
    }

    pub fn shift_edge_of(&self, morphism: &str, degree: i32) -> Option<EdgeId> {
        self.shifts.get(&(morphism.to_string(), degree)).copied()
    }

    pub fn zero_edge(&self, a: SortId, b: SortId) -> Option<EdgeId> {
        self.zero_edges.get(&(a, b)).copied()
    }

    pub fn cone(&self, key: &str) -> Option<&Cone> {
        self.cone_index.get(key).map(|&i| &self.cones[i])
    }

    pub fn cone_index(&self, key: &str) -> Option<usize> {
        self.cone_index.get(key).copied()
    }

    pub fn square(&self, t: usize, t2: usize, w: &str, z: &str) -> Option<&Square> {
        self.square_index.get(&(t, t2, w.to_string(), z.to_string())).map(|&i| &self.squares[i])
    }

    /// Level at which every sort and edge of the arrow exists.
    pub fn arrow_level(&self, a: &Arrow) -> usize {
        let edges = a.terms.keys().flatten().map(|e| self.edges[e.0].level);
        edges.chain([self.sort_level(a.src), self.sort_level(a.tgt)]).max().unwrap_or(0)
    }

    /// Classes at the cap depths, computed once per level.
    pub fn class_table(&self, level: usize) -> Arc<ClassTable> {
        self.levels[level]
            .classes
            .get_or_init(|| {
                let depth = self.caps.term_depth.max(self.caps.square_depth);
                let sorts: Vec<SortId> = self.sorts_at(level).collect();
                let q = self.quiver(level);
                Arc::new(ClassTable::new(classes_over(&q, &self.theory(level), &sorts, depth)))
            })
            .clone()
    }

    /// The class of an arrow among those enumerated at `level`; vanishing
    /// arrows always classify.
    pub fn classify(&self, level: usize, a: &Arrow) -> Option<TermClass> {
        let table = self.class_table(level);
        if let Some(&i) = table.by_rep.get(a) {
            return Some(table.classes[i].clone());
        }
        let theory = self.theory(level);
        if theory.vanishes(a) {
            let found = table.between(a.src, a.tgt).find(|c| c.vanishing).cloned();
            return Some(found.unwrap_or_else(|| {
                let q = self.quiver(level);
                let zero = Arrow::zero(a.src, a.tgt);
                TermClass {
                    src: a.src,
                    tgt: a.tgt,
                    key: show_arrow(&q, &zero),
                    rep: zero,
                    kind: ClassKind::Zero,
                    vanishing: true,
                    members: 0,
                }
            }));
        }
        let found = table.between(a.src, a.tgt).find(|c| !c.vanishing && theory.vanishes(&a.sub(&c.rep))).cloned();
        found
    }

    pub fn shift_sort(&self, s: SortId) -> Option<SortId> {
        self.shift_sorts.get(s.0).copied().flatten()
    }

    pub fn shift_edge(&self, e: EdgeId) -> Option<EdgeId> {
        self.shift_edges.get(e.0).copied().flatten()
    }

    /// `T1` on arrows, where every sort and edge translates.
    pub fn shift(&self, a: &Arrow) -> Option<Arrow> {
        let q = self.quiver(self.level());
        let (src, tgt) = (self.shift_sort(a.src)?, self.shift_sort(a.tgt)?);
        let mut out = Arrow::zero(src, tgt);
        for (p, c) in &a.terms {
            let p2 = p.iter().map(|&e| self.shift_edge(e)).collect::<Option<Vec<_>>>()?;
            out = out.add(&Arrow::path(src, tgt, normalize_path(&q, &p2)).scale(c));
        }
        Some(out)
    }

    fn shifted_cone(&self, c: usize) -> Option<usize> {
        let cone = &self.cones[c];
        let t = self.shift(&cone.class.rep)?;
        let class = self.classify(self.arrow_level(&cone.class.rep), &t)?;
        self.cone_index.get(&class.key).copied()
    }

    fn recompute_shift(&mut self) {
        self.shift_sorts = vec![None; self.sorts.len()];
        self.shift_edges = vec![None; self.edges.len()];
        for level in 0..=self.level() {
            for i in 0..self.sorts.len() {
                if self.sorts[i].level != level {
                    continue;
                }
                let image = match &self.sorts[i].kind {
                    SortKind::Graded { vertex, degree } => self.graded.get(&(vertex.clone(), degree - 1)).copied(),
                    SortKind::ZeroObject => Some(self.zero_object),
                    SortKind::Cone { .. } => {
                        let c = self.cone_by_sort[&SortId(i)];
                        self.shifted_cone(c).map(|d| self.cones[d].sort)
                    }
                    _ => None,
                };
                self.shift_sorts[i] = image;
            }
            for i in 0..self.edges.len() {
                if self.edges[i].level != level {
                    continue;
                }
                let e = &self.edges[i];
                let image = match &e.symbol {
                    Symbol::Shift { morphism, degree } => self.shifts.get(&(morphism.clone(), degree - 1)).copied(),
                    Symbol::Zero => match (self.shift_sort(e.src), self.shift_sort(e.tgt)) {
                        (Some(a), Some(b)) => self.zero_edges.get(&(a, b)).copied(),
                        _ => None,
                    },
                    Symbol::Projection { cone } => self.shifted_cone(*cone).map(|d| self.cones[d].pi),
                    Symbol::Connecting { cone } => self.shifted_cone(*cone).map(|d| self.cones[d].delta),
                    Symbol::Filler { square } => self.shifted_square(*square).map(|s| self.squares[s].edge),
                };
                self.shift_edges[i] = image;
            }
        }
    }

    fn shifted_square(&self, s: usize) -> Option<usize> {
        let sq = &self.squares[s];
        let (t, t2) = (self.shifted_cone(sq.t)?, self.shifted_cone(sq.t2)?);
        let w = self.classify(self.arrow_level(&sq.w.rep), &self.shift(&sq.w.rep)?)?;
        let z = self.classify(self.arrow_level(&sq.z.rep), &self.shift(&sq.z.rep)?)?;
        self.square_index.get(&(t, t2, w.key, z.key)).copied()
    }

    /// A filler between two cones over a square: the zero map when both
    /// sides vanish, otherwise the registered symbol.
    pub fn filler(&self, t: usize, t2: usize, w: &TermClass, z: &TermClass) -> Option<Arrow> {
        if w.vanishing && z.vanishing {
            return Some(Arrow::zero(self.cones[t].sort, self.cones[t2].sort));
        }
        let sq = self.square_index.get(&(t, t2, w.key.clone(), z.key.clone()))?;
        Some(Arrow::edge(&self.quiver(self.level()), self.squares[*sq].edge))
    }

    fn eligible(&self, c: &TermClass, level: usize) -> bool {
        c.kind != ClassKind::Identity
            && c.rep.len() <= self.caps.term_depth
            && self.arrow_level(&c.rep) == level
            && self.shift_sort(c.src).is_some()
            && self.shift_sort(c.tgt).is_some()
            && !self.cone_index.contains_key(&c.key)
    }

    /// Classes of the top level that get a cone at the next one, before
    /// the cap.
    pub fn eligible_classes(&self) -> Vec<TermClass> {
        let l = self.level();
        self.class_table(l).classes.iter().filter(|c| self.eligible(c, l)).cloned().collect()
    }

    /// Adds cones, connecting maps, their equations and triangles.
    pub fn extend_level(&mut self) -> Result<&LevelReport, TricatError> {
        let l = self.level();
        let next = l + 1;
        let q = self.quiver(l);
        let theory = self.theory(l);
        let table = self.class_table(l);
        let mut report = LevelReport { level: next, ..LevelReport::default() };
        let (sorts_before, edges_before, relations_before) = (self.sorts.len(), self.edges.len(), self.relations.len());

        let eligible = self.eligible_classes();
        report.eligible = eligible.len();
        let taken = eligible.len().min(self.caps.cones);
        report.capped_cones = eligible.len() - taken;
        let first_cone = self.cones.len();
        for c in eligible.into_iter().take(taken) {
            let sort = self.push_sort(format!("R[{}]", c.key), SortKind::Cone { key: c.key.clone() }, next);
            let idx = self.cones.len();
            let pi = self.push_edge(format!("π[{}]", c.key), c.tgt, sort, Symbol::Projection { cone: idx }, next);
            let shifted = self.shift_sort(c.src).expect("eligible sources translate");
            let delta = self.push_edge(format!("δ[{}]", c.key), sort, shifted, Symbol::Connecting { cone: idx }, next);
            self.cone_index.insert(c.key.clone(), idx);
            self.cone_by_sort.insert(sort, idx);
            self.cones.push(Cone { class: c, level: next, sort, pi, delta });
        }

        // Commuting squares between all cones, sides from the class table.
        let depth = self.caps.square_depth;
        let pairs: Vec<(usize, usize)> = (0..self.cones.len()).flat_map(|i| (0..self.cones.len()).map(move |j| (i, j))).collect();
        let found: Vec<Vec<(usize, usize, TermClass, TermClass)>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (t, t2) = (&self.cones[i].class, &self.cones[j].class);
                let mut out = Vec::new();
                for w in table.between(t.src, t2.src).filter(|w| w.rep.len() <= depth) {
                    for z in table.between(t.tgt, t2.tgt).filter(|z| z.rep.len() <= depth) {
                        if self.square_index.contains_key(&(i, j, w.key.clone(), z.key.clone())) {
                            continue;
                        }
                        if w.vanishing && z.vanishing {
                            out.push((i, j, w.clone(), z.clone()));
                            continue;
                        }
                        let lhs = t.rep.then(&q, &z.rep);
                        let rhs = w.rep.then(&q, &t2.rep);
                        if theory.vanishes(&lhs.sub(&rhs)) {
                            out.push((i, j, w.clone(), z.clone()));
                        }
                    }
                }
                out
            })
            .collect();
        let first_square = self.squares.len();
        for (i, j, w, z) in found.into_iter().flatten() {
            if w.vanishing && z.vanishing {
                report.zero_squares += 1;
                continue;
            }
            if self.squares.len() - first_square >= self.caps.squares {
                report.unprocessed_squares += 1;
                continue;
            }
            let name = format!("R[{}|{}|{}|{}]", self.cones[i].class.key, self.cones[j].class.key, w.key, z.key);
            let idx = self.squares.len();
            let edge = self.push_edge(name, self.cones[i].sort, self.cones[j].sort, Symbol::Filler { square: idx }, next);
            self.square_index.insert((i, j, w.key.clone(), z.key.clone()), idx);
            self.squares.push(Square { t: i, t2: j, w, z, level: next, edge });
        }
        report.squares = self.squares.len() - first_square;

        let q2 = Arc::new(self.build_quiver()?);
        let new_relations = self.square_relations(&q2, first_square, l, &mut report);
        self.relations.extend(new_relations.into_iter().map(|relation| RelationDecl { level: next, relation, tprime: false }));
        self.push_level(q2.clone());

        for c in first_cone..self.cones.len() {
            let cone = &self.cones[c];
            let arrows = [cone.class.rep.clone(), Arrow::edge(&q2, cone.pi), Arrow::edge(&q2, cone.delta)];
            let provenance = Provenance::Canonical { class: cone.class.key.clone() };
            self.registry.insert(Triangle { arrows, provenance, level: next });
        }
        self.octahedra(&q2, first_cone, l, &mut report);
        report.triangles_capped = self.close_registry(next);
        report.triangles = self.registry.len();
        report.new_sorts = self.sorts.len() - sorts_before;
        report.new_symbols = self.edges.len() - edges_before;
        report.new_relations = self.relations.len() - relations_before;
        self.reports.push(report);
        Ok(self.reports.last().expect("just pushed"))
    }

    /// Naturality, identity and composite laws for squares from `first` on.
    fn square_relations(&self, q: &Quiver, first: usize, l: usize, report: &mut LevelReport) -> Vec<Relation> {
        let mut out = Vec::new();
        for sq in &self.squares[first..] {
            let (ct, ct2) = (&self.cones[sq.t], &self.cones[sq.t2]);
            let r = Arrow::edge(q, sq.edge);
            let name = q.edge_name(sq.edge);
            let (pi, pi2) = (Arrow::edge(q, ct.pi), Arrow::edge(q, ct2.pi));
            out.push(relation(format!("naturality π {name}"), pi.then(q, &r).sub(&sq.z.rep.then(q, &pi2))));
            match self.shift(&sq.w.rep) {
                Some(tw) => {
                    let (d, d2) = (Arrow::edge(q, ct.delta), Arrow::edge(q, ct2.delta));
                    out.push(relation(format!("naturality δ {name}"), r.then(q, &d2).sub(&d.then(q, &tw))));
                }
                None => report.untranslated_naturality += 1,
            }
            if sq.t == sq.t2 && sq.w.kind == ClassKind::Identity && sq.z.kind == ClassKind::Identity {
                out.push(relation(format!("identity {name}"), r.sub(&Arrow::identity(ct.sort))));
            }
        }
        // R' ∘ R = R'' wherever the composite square has a symbol.
        let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, sq) in self.squares.iter().enumerate() {
            by_source.entry(sq.t).or_default().push(i);
        }
        let mut memo: HashMap<Arrow, Option<TermClass>> = HashMap::new();
        let mut class_of = |a: Arrow| memo.entry(a.clone()).or_insert_with(|| self.classify(l, &a)).clone();
        for (i, s1) in self.squares.iter().enumerate() {
            for &j in by_source.get(&s1.t2).into_iter().flatten() {
                if i < first && j < first {
                    continue;
                }
                let s2 = &self.squares[j];
                let (Some(w), Some(z)) = (class_of(s1.w.rep.then(q, &s2.w.rep)), class_of(s1.z.rep.then(q, &s2.z.rep))) else {
                    report.composites_missing += 1;
                    continue;
                };
                if w.vanishing && z.vanishing {
                    continue;
                }
                let Some(&k) = self.square_index.get(&(s1.t, s2.t2, w.key, z.key)) else {
                    report.composites_missing += 1;
                    continue;
                };
                let composite = Arrow::edge(q, s1.edge).then(q, &Arrow::edge(q, s2.edge));
                let label = format!("composite {} then {}", q.edge_name(s1.edge), q.edge_name(s2.edge));
                out.push(relation(label, composite.sub(&Arrow::edge(q, self.squares[k].edge))));
            }
        }
        out
    }

    /// `(R_(u, vu, id, v), R_(vu, v, u, id), T1(π_u)∘δ_v)` for composable
    /// pairs of the classes that got cones at this level.
    fn octahedra(&mut self, q: &Quiver, first_cone: usize, l: usize, report: &mut LevelReport) {
        let next = l + 1;
        let mut found = Vec::new();
        for iu in first_cone..self.cones.len() {
            for iv in first_cone..self.cones.len() {
                let (u, v) = (&self.cones[iu].class, &self.cones[iv].class);
                if u.tgt != v.src {
                    continue;
                }
                report.composable_pairs += 1;
                match self.octahedron(q, iu, iv, l) {
                    Some(arrows) => found.push((arrows, u.key.clone(), v.key.clone())),
                    None => report.octahedra_truncated += 1,
                }
            }
        }
        for (arrows, u, v) in found {
            if self.registry.insert(Triangle { arrows, provenance: Provenance::Octahedron { u, v }, level: next }).1 {
                report.octahedra += 1;
            }
        }
    }

    /// The octahedron triangle of a composable pair of cones, if every piece
    /// exists.
    pub fn octahedron(&self, q: &Quiver, iu: usize, iv: usize, l: usize) -> Option<[Arrow; 3]> {
        let (u, v) = (&self.cones[iu].class, &self.cones[iv].class);
        let vu = self.classify(l, &u.rep.then(q, &v.rep))?;
        if vu.kind == ClassKind::Identity {
            return None;
        }
        let ivu = *self.cone_index.get(&vu.key)?;
        let id_src = self.classify(l, &Arrow::identity(u.src))?;
        let id_tgt = self.classify(l, &Arrow::identity(v.tgt))?;
        let a = self.filler(iu, ivu, &id_src, v)?;
        let b = self.filler(ivu, iv, u, &id_tgt)?;
        let tu = self.classify(l, &self.shift(&u.rep)?)?;
        let itu = *self.cone_index.get(&tu.key)?;
        let c = Arrow::edge(q, self.cones[iv].delta).then(q, &Arrow::edge(q, self.cones[itu].pi));
        Some([a, b, c])
    }

    /// `(a, b, c) ↦ (b, c, -T1(a))`.
    pub fn rotate(&self, t: &[Arrow; 3]) -> Option<[Arrow; 3]> {
        let ta = self.shift(&t[0])?;
        Some([t[1].clone(), t[2].clone(), ta.scale(&Q::from_i64(-1))])
    }

    pub fn shift_triangle(&self, t: &[Arrow; 3]) -> Option<[Arrow; 3]> {
        Some([self.shift(&t[0])?, self.shift(&t[1])?, self.shift(&t[2])?])
    }

    /// Closes the registry under rotation and translation. Returns whether
    /// the triangle cap stopped it.
    fn close_registry(&mut self, level: usize) -> bool {
        let mut i = 0;
        while i < self.registry.len() {
            if self.registry.len() >= self.caps.triangles {
                return true;
            }
            let t = self.registry.triangles()[i].arrows.clone();
            if let Some(r) = self.rotate(&t) {
                self.registry.insert(Triangle { arrows: r, provenance: Provenance::Rotation { of: i }, level });
            }
            if let Some(s) = self.shift_triangle(&t) {
                self.registry.insert(Triangle { arrows: s, provenance: Provenance::Translation { of: i }, level });
            }
            i += 1;
        }
        false
    }

    /// Adds the given relations at the top level and rebuilds its theory.
    pub(crate) fn add_top_relations(&mut self, relations: Vec<Relation>, tprime: bool) {
        let level = self.level();
        self.relations.extend(relations.into_iter().map(|relation| RelationDecl { level, relation, tprime }));
        let q = self.quiver(level);
        let theory = Arc::new(self.make_theory(&q));
        self.levels[level] = LevelData { quiver: q, theory, classes: OnceLock::new() };
    }
}
