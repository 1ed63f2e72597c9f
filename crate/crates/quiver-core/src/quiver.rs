//! Quiver fragments: sorts, edges, declared composites, distinguished pairs and points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct SortId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for SortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SortKind {
    /// The distinguished coefficient sort `K0`.
    Coefficient,
    /// `H(X, Y, i)`; `sub = None` stands for the empty subvariety.
    Homology { vertex: String, sub: Option<String>, degree: i32 },
    /// `(X, n)` with `n <= 0`.
    Graded { vertex: String, degree: i32 },
    /// A freely added cone sort, keyed by the class of the arrow it completes.
    Cone { key: String },
    /// A zero object.
    ZeroObject,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Sort {
    pub name: String,
    #[serde(flatten)]
    pub kind: SortKind,
}

impl Sort {
    pub fn degree(&self) -> Option<i32> {
        match &self.kind {
            SortKind::Homology { degree, .. } | SortKind::Graded { degree, .. } => Some(*degree),
            _ => None,
        }
    }

    pub fn vertex(&self) -> Option<&str> {
        match &self.kind {
            SortKind::Homology { vertex, .. } | SortKind::Graded { vertex, .. } => Some(vertex),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralKind {
    /// The edge is interpreted as the zero map.
    Zero,
    /// An inverse of an excision isomorphism; its inverse laws are declared as composites.
    ExcisionInverse,
    User,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeKind {
    Functorial { label: String },
    Boundary,
    Structural { role: StructuralKind },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub src: SortId,
    pub tgt: SortId,
    #[serde(flatten)]
    pub kind: EdgeKind,
}

impl Edge {
    /// Functorial edges over the identity morphism are elided by normalization.
    pub fn is_identity(&self) -> bool {
        matches!(&self.kind, EdgeKind::Functorial { label } if label == "id") && self.src == self.tgt
    }

    pub fn is_zero_map(&self) -> bool {
        matches!(self.kind, EdgeKind::Structural { role: StructuralKind::Zero })
    }
}

/// Right-hand side of a declared composite.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Composite {
    Edge(EdgeId),
    Identity,
}

/// A rational point of a vertex together with its structure edges.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Point {
    pub vertex: String,
    pub label: String,
    pub component: String,
    /// `H(X, _, 0)`.
    pub sort: SortId,
    /// `K0 -> H(X, _, 0)`.
    pub edge: EdgeId,
    /// `H(X, _, 0) -> K0`.
    pub bang: EdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuiverError {
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("more than one coefficient sort: `{0}` and `{1}`")]
    MultipleCoefficient(String, String),
    #[error("boundary shape violation in `{edge}`: expected (X,Y,i) -> (Y,Z,i-1)")]
    BoundaryShape { edge: String },
    #[error("graded sort `{0}` must have non-positive degree")]
    GradedDegree(String),
    #[error("identity edge `{0}` must be a loop")]
    IdentityNotLoop(String),
    #[error("pair ({f}, {g}) is not composable")]
    PairNotComposable { f: String, g: String },
    #[error("composite `{g} o {f}`: {reason}")]
    CompositeType { g: String, f: String, reason: String },
    #[error("composite `{g} o {f}` declared twice with different results")]
    CompositeConflict { g: String, f: String },
    #[error("composition is not associative on ({k}, {g}, {f})")]
    NonAssociative { k: String, g: String, f: String },
    #[error("point `{vertex}.{label}` needs a sort `homology {vertex} _ 0`")]
    PointWithoutSort { vertex: String, label: String },
    #[error("edge `{edge}` has the wrong shape for {role}")]
    StructureEdge { edge: String, role: String },
    #[error("empty degree range {0}..{1}")]
    DegreeRange(i32, i32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    sorts: Vec<Sort>,
    edges: Vec<Edge>,
    compositions: BTreeMap<(EdgeId, EdgeId), Composite>,
    pairs: Vec<(EdgeId, EdgeId)>,
    points: Vec<Point>,
    degrees: Option<(i32, i32)>,
    coefficient: SortId,
    sort_index: BTreeMap<String, SortId>,
    edge_index: BTreeMap<String, EdgeId>,
}

impl Quiver {
    pub fn builder() -> QuiverBuilder {
        QuiverBuilder::default()
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn sort_ids(&self) -> impl Iterator<Item = SortId> {
        (0..self.sorts.len()).map(SortId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn sort(&self, id: SortId) -> &Sort {
        &self.sorts[id.0]
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn sort_name(&self, id: SortId) -> &str {
        &self.sorts[id.0].name
    }

    pub fn edge_name(&self, id: EdgeId) -> &str {
        &self.edges[id.0].name
    }

    pub fn sort_by_name(&self, name: &str) -> Option<SortId> {
        self.sort_index.get(name).copied()
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn coefficient(&self) -> SortId {
        self.coefficient
    }

    pub fn compositions(&self) -> &BTreeMap<(EdgeId, EdgeId), Composite> {
        &self.compositions
    }

    /// Declared value of `g o f`.
    pub fn compose(&self, g: EdgeId, f: EdgeId) -> Option<Composite> {
        self.compositions.get(&(g, f)).copied()
    }

    pub fn pairs(&self) -> &[(EdgeId, EdgeId)] {
        &self.pairs
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn degrees(&self) -> Option<(i32, i32)> {
        self.degrees
    }

    pub fn edges_from(&self, s: SortId) -> impl Iterator<Item = EdgeId> + '_ {
        self.edge_ids().filter(move |&e| self.edges[e.0].src == s)
    }

    pub fn edges_to(&self, s: SortId) -> impl Iterator<Item = EdgeId> + '_ {
        self.edge_ids().filter(move |&e| self.edges[e.0].tgt == s)
    }

    /// Edges defined as the composite of two others.
    pub fn composite_edges(&self) -> BTreeSet<EdgeId> {
        self.compositions
            .values()
            .filter_map(|c| match c {
                Composite::Edge(h) => Some(*h),
                Composite::Identity => None,
            })
            .collect()
    }

    /// Distinct vertices carrying points, with their components in first-seen order.
    pub fn point_components(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for p in &self.points {
            let comps = out.entry(p.vertex.clone()).or_default();
            if !comps.contains(&p.component) {
                comps.push(p.component.clone());
            }
        }
        out
    }

    /// Renames vertices in sort kinds and names; used by symmetry checks.
    pub fn relabel_vertices(&self, map: &BTreeMap<String, String>) -> Quiver {
        let ren = |v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string());
        let mut q = self.clone();
        for s in &mut q.sorts {
            match &mut s.kind {
                SortKind::Homology { vertex, sub, .. } => {
                    *vertex = ren(vertex);
                    if let Some(y) = sub {
                        *y = ren(y);
                    }
                }
                SortKind::Graded { vertex, .. } => *vertex = ren(vertex),
                _ => {}
            }
        }
        for p in &mut q.points {
            p.vertex = ren(&p.vertex);
        }
        q
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&QuiverJson::from(self)).expect("quiver serializes")
    }

    pub fn from_json(text: &str) -> Result<Quiver, QuiverLoadError> {
        let j: QuiverJson = serde_json::from_str(text)?;
        Ok(j.into_quiver()?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum QuiverLoadError {
    #[error("malformed quiver JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] QuiverError),
}

#[derive(Serialize, Deserialize)]
struct CompositeJson {
    g: String,
    f: String,
    h: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    name: String,
    src: String,
    tgt: String,
    #[serde(flatten)]
    kind: EdgeKind,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    vertex: String,
    label: String,
    component: String,
}

#[derive(Serialize, Deserialize)]
struct QuiverJson {
    degrees: Option<(i32, i32)>,
    sorts: Vec<Sort>,
    edges: Vec<EdgeJson>,
    compositions: Vec<CompositeJson>,
    pairs: Vec<(String, String)>,
    points: Vec<PointJson>,
}

impl From<&Quiver> for QuiverJson {
    fn from(q: &Quiver) -> Self {
        let point_edges: BTreeSet<EdgeId> = q.points.iter().map(|p| p.edge).collect();
        let mut j = QuiverJson {
            degrees: q.degrees,
            sorts: q.sorts.clone(),
            edges: q
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !point_edges.contains(&EdgeId(*i)))
                .map(|(_, e)| EdgeJson {
                    name: e.name.clone(),
                    src: q.sort_name(e.src).to_string(),
                    tgt: q.sort_name(e.tgt).to_string(),
                    kind: e.kind.clone(),
                })
                .collect(),
            compositions: q
                .compositions
                .iter()
                .filter(|((g, f), _)| !(point_edges.contains(f) && q.points.iter().any(|p| p.bang == *g)))
                .map(|((g, f), h)| CompositeJson {
                    g: q.edge_name(*g).to_string(),
                    f: q.edge_name(*f).to_string(),
                    h: match h {
                        Composite::Edge(h) => Some(q.edge_name(*h).to_string()),
                        Composite::Identity => None,
                    },
                })
                .collect::<Vec<_>>(),
            pairs: q.pairs.iter().map(|(f, g)| (q.edge_name(*f).to_string(), q.edge_name(*g).to_string())).collect(),
            points: q
                .points
                .iter()
                .map(|p| PointJson { vertex: p.vertex.clone(), label: p.label.clone(), component: p.component.clone() })
                .collect(),
        };
        // Edge ids shift when points are re-declared, so order composites by name.
        j.compositions.sort_by(|a, b| (&a.g, &a.f).cmp(&(&b.g, &b.f)));
        j
    }
}

impl QuiverJson {
    fn into_quiver(self) -> Result<Quiver, QuiverError> {
        let mut b = Quiver::builder();
        if let Some((lo, hi)) = self.degrees {
            b.degrees(lo, hi)?;
        }
        for s in self.sorts {
            b.sort(&s.name, s.kind)?;
        }
        for e in self.edges {
            b.edge(&e.name, &e.src, &e.tgt, e.kind)?;
        }
        for p in self.points {
            b.point(&p.vertex, &p.label, &p.component)?;
        }
        for c in self.compositions {
            b.compose(&c.g, &c.f, c.h.as_deref())?;
        }
        for (f, g) in self.pairs {
            b.pair(&f, &g)?;
        }
        b.build()
    }
}

/// Incremental construction; `build` validates all invariants.
#[derive(Default, Clone, Debug)]
pub struct QuiverBuilder {
    sorts: Vec<Sort>,
    edges: Vec<Edge>,
    compositions: BTreeMap<(EdgeId, EdgeId), Composite>,
    pairs: Vec<(EdgeId, EdgeId)>,
    points: Vec<Point>,
    degrees: Option<(i32, i32)>,
    sort_index: BTreeMap<String, SortId>,
    edge_index: BTreeMap<String, EdgeId>,
}

impl QuiverBuilder {
    pub fn degrees(&mut self, lo: i32, hi: i32) -> Result<&mut Self, QuiverError> {
        if lo > hi {
            return Err(QuiverError::DegreeRange(lo, hi));
        }
        self.degrees = Some((lo, hi));
        Ok(self)
    }

    pub fn sort(&mut self, name: &str, kind: SortKind) -> Result<SortId, QuiverError> {
        if self.sort_index.contains_key(name) || self.edge_index.contains_key(name) {
            return Err(QuiverError::Duplicate(name.into()));
        }
        if let SortKind::Graded { degree, .. } = &kind {
            if *degree > 0 {
                return Err(QuiverError::GradedDegree(name.into()));
            }
        }
        if kind == SortKind::Coefficient {
            if let Some(prev) = self.sorts.iter().find(|s| s.kind == SortKind::Coefficient) {
                return Err(QuiverError::MultipleCoefficient(prev.name.clone(), name.into()));
            }
        }
        let id = SortId(self.sorts.len());
        self.sorts.push(Sort { name: name.into(), kind });
        self.sort_index.insert(name.into(), id);
        Ok(id)
    }

    pub fn sort_id(&self, name: &str) -> Result<SortId, QuiverError> {
        self.sort_index.get(name).copied().ok_or_else(|| QuiverError::UnknownSort(name.into()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId, QuiverError> {
        self.edge_index.get(name).copied().ok_or_else(|| QuiverError::UnknownEdge(name.into()))
    }

    fn coefficient_or_default(&mut self) -> SortId {
        match self.sorts.iter().position(|s| s.kind == SortKind::Coefficient) {
            Some(i) => SortId(i),
            None => self.sort("K0", SortKind::Coefficient).expect("K0 is free"),
        }
    }

    pub fn edge(&mut self, name: &str, src: &str, tgt: &str, kind: EdgeKind) -> Result<EdgeId, QuiverError> {
        let s = self.sort_id(src)?;
        let t = self.sort_id(tgt)?;
        self.edge_between(name, s, t, kind)
    }

    pub fn edge_between(&mut self, name: &str, s: SortId, t: SortId, kind: EdgeKind) -> Result<EdgeId, QuiverError> {
        if self.edge_index.contains_key(name) || self.sort_index.contains_key(name) || name == "id" {
            return Err(QuiverError::Duplicate(name.into()));
        }
        let e = Edge { name: name.into(), src: s, tgt: t, kind };
        if matches!(e.kind, EdgeKind::Boundary) && !boundary_shape_ok(&self.sorts[s.0], &self.sorts[t.0]) {
            return Err(QuiverError::BoundaryShape { edge: name.into() });
        }
        if matches!(&e.kind, EdgeKind::Functorial { label } if label == "id") && s != t {
            return Err(QuiverError::IdentityNotLoop(name.into()));
        }
        let id = EdgeId(self.edges.len());
        self.edges.push(e);
        self.edge_index.insert(name.into(), id);
        Ok(id)
    }

    /// Declares `g o f = h`; `h = None` declares the identity.
    pub fn compose(&mut self, g: &str, f: &str, h: Option<&str>) -> Result<&mut Self, QuiverError> {
        let gi = self.edge_id(g)?;
        let fi = self.edge_id(f)?;
        let hv = match h {
            Some(h) => Composite::Edge(self.edge_id(h)?),
            None => Composite::Identity,
        };
        self.compose_ids(gi, fi, hv)
    }

    pub fn compose_ids(&mut self, g: EdgeId, f: EdgeId, h: Composite) -> Result<&mut Self, QuiverError> {
        let (ge, fe) = (&self.edges[g.0], &self.edges[f.0]);
        let err = |reason: &str| QuiverError::CompositeType { g: ge.name.clone(), f: fe.name.clone(), reason: reason.into() };
        if fe.tgt != ge.src {
            return Err(err("not composable"));
        }
        match h {
            Composite::Edge(h) => {
                let he = &self.edges[h.0];
                if he.src != fe.src || he.tgt != ge.tgt {
                    return Err(err(&format!("result `{}` has the wrong type", he.name)));
                }
            }
            Composite::Identity => {
                if fe.src != ge.tgt {
                    return Err(err("identity composite must be a loop"));
                }
            }
        }
        if let Some(prev) = self.compositions.get(&(g, f)) {
            if *prev != h {
                return Err(QuiverError::CompositeConflict { g: ge.name.clone(), f: fe.name.clone() });
            }
        }
        self.compositions.insert((g, f), h);
        Ok(self)
    }

    pub fn pair(&mut self, f: &str, g: &str) -> Result<&mut Self, QuiverError> {
        let fi = self.edge_id(f)?;
        let gi = self.edge_id(g)?;
        if self.edges[fi.0].tgt != self.edges[gi.0].src {
            return Err(QuiverError::PairNotComposable { f: f.into(), g: g.into() });
        }
        self.pairs.push((fi, gi));
        Ok(self)
    }

    /// Declares a rational point; creates `pt.X.x` and (once per vertex) `bang.X`.
    pub fn point(&mut self, vertex: &str, label: &str, component: &str) -> Result<&mut Self, QuiverError> {
        let k0 = self.coefficient_or_default();
        let sort = self
            .sorts
            .iter()
            .position(|s| matches!(&s.kind, SortKind::Homology { vertex: v, sub: None, degree: 0 } if v == vertex))
            .map(SortId)
            .ok_or_else(|| QuiverError::PointWithoutSort { vertex: vertex.into(), label: label.into() })?;
        let bang_name = format!("bang.{vertex}");
        let bang = match self.edge_index.get(&bang_name) {
            Some(&b) => {
                let e = &self.edges[b.0];
                if e.src != sort || e.tgt != k0 {
                    return Err(QuiverError::StructureEdge { edge: bang_name, role: "a structure map to K0".into() });
                }
                b
            }
            None => self.edge_between(&bang_name, sort, k0, EdgeKind::Functorial { label: format!("!{vertex}") })?,
        };
        let edge = self.edge_between(
            &format!("pt.{vertex}.{label}"),
            k0,
            sort,
            EdgeKind::Functorial { label: format!("f_{vertex}.{label}") },
        )?;
        self.compositions.insert((bang, edge), Composite::Identity);
        self.points.push(Point { vertex: vertex.into(), label: label.into(), component: component.into(), sort, edge, bang });
        Ok(self)
    }

    pub fn build(mut self) -> Result<Quiver, QuiverError> {
        let coefficient = self.coefficient_or_default();
        check_associativity(&self.edges, &self.compositions)?;
        Ok(Quiver {
            sorts: self.sorts,
            edges: self.edges,
            compositions: self.compositions,
            pairs: self.pairs,
            points: self.points,
            degrees: self.degrees,
            coefficient,
            sort_index: self.sort_index,
            edge_index: self.edge_index,
        })
    }
}

fn boundary_shape_ok(src: &Sort, tgt: &Sort) -> bool {
    match (&src.kind, &tgt.kind) {
        (SortKind::Homology { sub: Some(y), degree: i, .. }, SortKind::Homology { vertex: y2, degree: j, .. }) => {
            y == y2 && *j == i - 1
        }
        _ => false,
    }
}

fn compose_values(table: &BTreeMap<(EdgeId, EdgeId), Composite>, g: Composite, f: Composite) -> Option<Composite> {
    match (g, f) {
        (Composite::Identity, x) | (x, Composite::Identity) => Some(x),
        (Composite::Edge(g), Composite::Edge(f)) => table.get(&(g, f)).copied(),
    }
}

fn check_associativity(edges: &[Edge], table: &BTreeMap<(EdgeId, EdgeId), Composite>) -> Result<(), QuiverError> {
    for (&(g, f), &gf) in table {
        for (&(k, g2), &kg) in table {
            if g2 != g {
                continue;
            }
            let left = compose_values(table, Composite::Edge(k), gf);
            let right = compose_values(table, kg, Composite::Edge(f));
            if let (Some(l), Some(r)) = (left, right) {
                if l != r {
                    return Err(QuiverError::NonAssociative {
                        k: edges[k.0].name.clone(),
                        g: edges[g.0].name.clone(),
                        f: edges[f.0].name.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hom(v: &str, sub: Option<&str>, i: i32) -> SortKind {
        SortKind::Homology { vertex: v.into(), sub: sub.map(Into::into), degree: i }
    }

    fn functorial(l: &str) -> EdgeKind {
        EdgeKind::Functorial { label: l.into() }
    }

    #[test]
    fn coefficient_sort_is_added() {
        let mut b = Quiver::builder();
        b.sort("A", hom("X", None, 0)).unwrap();
        let q = b.build().unwrap();
        assert_eq!(q.sort_name(q.coefficient()), "K0");
        assert_eq!(q.sorts().len(), 2);
    }

    #[test]
    fn boundary_shape_is_enforced() {
        let mut b = Quiver::builder();
        b.sort("XY1", hom("X", Some("Y"), 1)).unwrap();
        b.sort("XZ1", hom("X", Some("Z"), 1)).unwrap();
        b.sort("YZ0", hom("Y", Some("Z"), 0)).unwrap();
        let err = b.edge("d", "XY1", "XZ1", EdgeKind::Boundary).unwrap_err();
        assert!(err.to_string().contains("boundary shape violation"));
        b.edge("d", "XY1", "YZ0", EdgeKind::Boundary).unwrap();
    }

    #[test]
    fn non_associative_table_is_rejected() {
        let mut b = Quiver::builder();
        for n in ["A", "B", "C", "D"] {
            b.sort(n, hom(n, None, 0)).unwrap();
        }
        b.edge("f", "A", "B", functorial("f")).unwrap();
        b.edge("g", "B", "C", functorial("g")).unwrap();
        b.edge("k", "C", "D", functorial("k")).unwrap();
        b.edge("gf", "A", "C", functorial("gf")).unwrap();
        b.edge("kg", "B", "D", functorial("kg")).unwrap();
        b.edge("h1", "A", "D", functorial("h1")).unwrap();
        b.edge("h2", "A", "D", functorial("h2")).unwrap();
        b.compose("g", "f", Some("gf")).unwrap();
        b.compose("k", "g", Some("kg")).unwrap();
        b.compose("k", "gf", Some("h1")).unwrap();
        b.compose("kg", "f", Some("h2")).unwrap();
        assert!(matches!(b.build(), Err(QuiverError::NonAssociative { .. })));
    }

    #[test]
    fn points_create_structure_edges() {
        let mut b = Quiver::builder();
        b.sort("X0", hom("X", None, 0)).unwrap();
        b.point("X", "x", "c1").unwrap();
        b.point("X", "y", "c2").unwrap();
        let q = b.build().unwrap();
        let pt = q.edge_by_name("pt.X.x").unwrap();
        let bang = q.edge_by_name("bang.X").unwrap();
        assert_eq!(q.compose(bang, pt), Some(Composite::Identity));
        assert_eq!(q.point_components()["X"], vec!["c1".to_string(), "c2".to_string()]);
    }
}
