//! A leveled syntactic construction of a triangulated category over graded
//! copies of a finite diagram of schemes.
//!
//! Level 0 has one sort `(X, n)` per scheme and degree, the shifted morphisms
//! `(f, n)`, a zero object and zero maps. Each further level adds a cone sort
//! `R_t` with `π_t` and `δ_t` for every eligible class of arrows, connecting
//! maps for commuting squares, and the distinguished triangles those give.
//! Everything is finite: caps on cones, square depth and triangles keep each
//! level total and every truncation is reported.

pub mod classes;
pub mod export;
pub mod reps;
pub mod state;
pub mod triangles;
pub mod verify;

pub use classes::{term_classes, ClassKind, TermClass};
pub use export::{export_graph, load_graph, Format, GraphExport};
pub use reps::{mapping_cone_representation, ConeRepresentation, RepresentationCheck};
pub use state::{build, init_level0, Caps, Cone, LevelReport, Morphism, SchemeGraph, Square, Symbol, TriCatState};
pub use triangles::{IsoWitness, Provenance, Registry, Triangle};
pub use verify::{verify_triangulated_axioms, AxiomCheck, AxiomReport, TPrimeReport};

#[derive(Debug, thiserror::Error)]
pub enum TricatError {
    #[error("the input has no schemes")]
    NoSchemes,
    #[error("the input declares no degree range")]
    NoDegrees,
    #[error("degree range {0}..{1} must be non-positive and contain 0")]
    Degrees(i32, i32),
    #[error("morphism {0} refers to unknown scheme {1}")]
    UnknownScheme(String, String),
    #[error(transparent)]
    Quiver(#[from] quiver_core::QuiverError),
    #[error("unknown export format {0}")]
    Format(String),
    #[error("malformed graph export: {0}")]
    Load(#[from] serde_json::Error),
    #[error("isomorphism rejected: {0}")]
    Isomorphism(String),
}
