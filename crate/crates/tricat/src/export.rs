//! DOT and JSON views of a built state. JSON loads back losslessly.

use std::fmt::Write as _;
use std::str::FromStr;

use quiver_core::SortKind;
use serde::{Deserialize, Serialize};

use crate::state::{Symbol, TriCatState};
use crate::triangles::Provenance;
use crate::TricatError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
}

impl FromStr for Format {
    type Err = TricatError;

    fn from_str(s: &str) -> Result<Format, TricatError> {
        match s {
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            other => Err(TricatError::Format(other.into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeExport {
    pub name: String,
    pub kind: String,
    pub level: usize,
    pub shift: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowExport {
    pub name: String,
    pub src: String,
    pub tgt: String,
    pub kind: String,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleExport {
    pub arrows: [String; 3],
    pub provenance: String,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphExport {
    pub level: usize,
    pub tprime: bool,
    pub relations: usize,
    pub nodes: Vec<NodeExport>,
    pub arrows: Vec<ArrowExport>,
    pub triangles: Vec<TriangleExport>,
}

fn provenance(p: &Provenance) -> String {
    match p {
        Provenance::Trivial { sort } => format!("trivial {sort}"),
        Provenance::Canonical { class } => format!("canonical {class}"),
        Provenance::Rotation { of } => format!("rotation of #{of}"),
        Provenance::Translation { of } => format!("translation of #{of}"),
        Provenance::Octahedron { u, v } => format!("octahedron {u} ; {v}"),
        Provenance::IsomorphicCopy { of } => format!("isomorphic copy of #{of}"),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl GraphExport {
    pub fn from_state(state: &TriCatState) -> GraphExport {
        let q = state.quiver(state.level());
        let nodes = state
            .sort_decls()
            .iter()
            .enumerate()
            .map(|(i, s)| NodeExport {
                name: s.name.clone(),
                kind: match s.kind {
                    SortKind::Coefficient => "coefficient",
                    SortKind::Graded { .. } => "graded",
                    SortKind::Cone { .. } => "cone",
                    SortKind::ZeroObject => "zero",
                    SortKind::Homology { .. } => "homology",
                }
                .into(),
                level: s.level,
                shift: state.shift_sort(quiver_core::SortId(i)).map(|t| q.sort_name(t).to_string()),
            })
            .collect();
        let arrows = state
            .edge_decls()
            .iter()
            .map(|e| ArrowExport {
                name: e.name.clone(),
                src: q.sort_name(e.src).into(),
                tgt: q.sort_name(e.tgt).into(),
                kind: match e.symbol {
                    Symbol::Shift { .. } => "shift",
                    Symbol::Zero => "zero",
                    Symbol::Projection { .. } => "projection",
                    Symbol::Connecting { .. } => "connecting",
                    Symbol::Filler { .. } => "filler",
                }
                .into(),
                level: e.level,
            })
            .collect();
        let triangles = state
            .registry
            .triangles()
            .iter()
            .map(|t| TriangleExport {
                arrows: t.arrows.clone().map(|a| crate::classes::show_arrow(&q, &a)),
                provenance: provenance(&t.provenance),
                level: t.level,
            })
            .collect();
        GraphExport { level: state.level(), tprime: state.tprime, relations: state.relations().len(), nodes, arrows, triangles }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("export serializes");
        s.push('\n');
        s
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tricat {\n");
        for n in &self.nodes {
            let shape = if n.kind == "cone" { "box" } else { "ellipse" };
            let _ = writeln!(out, "  {} [shape={shape}];", quote(&n.name));
        }
        for a in &self.arrows {
            let style = if a.kind == "zero" { ", style=dotted" } else { "" };
            let _ = writeln!(out, "  {} -> {} [label={}{style}];", quote(&a.src), quote(&a.tgt), quote(&a.name));
        }
        for t in &self.triangles {
            let _ = writeln!(out, "  // triangle ({}, {}, {}) {}", t.arrows[0], t.arrows[1], t.arrows[2], t.provenance);
        }
        out.push_str("}\n");
        out
    }
}

pub fn export_graph(state: &TriCatState, format: Format) -> String {
    let g = GraphExport::from_state(state);
    match format {
        Format::Dot => g.to_dot(),
        Format::Json => g.to_json(),
    }
}

pub fn load_graph(text: &str) -> Result<GraphExport, TricatError> {
    Ok(serde_json::from_str(text)?)
}
