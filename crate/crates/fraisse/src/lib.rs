//! Fraïssé-style checks on categories of finite structures: amalgamation,
//! joint embedding, homogeneity and universality, chains converging to a
//! homogeneous object, and the semantic consequences of homogeneity on
//! models of a quiver theory.

pub mod axioms;
pub mod boolean;
pub mod category;
pub mod chain;
pub mod exactness;
pub mod field;
pub mod presentations;
pub mod sets;
pub mod triviality;
pub mod vector;

pub use axioms::{homogeneity_axioms, AxiomCheck, HomogeneityAxiom};
pub use boolean::{agreement, split_report, AgreementReport, BaHom, BaSequent, BaTerm, BooleanAlgebras, FiniteBa, SplitReport};
pub use category::{
    check_ap, check_homogeneous, check_jep, check_universal, sample_problem, sample_span, solve_problems, Amalgamation,
    Extension, FiniteStructureCategory, Problem, Record, Report, Span, Summary,
};
pub use chain::{fraisse_chain, Chain, Resolution};
pub use exactness::{strong_exactness_check, surjectivity_check, FibreRecord, StrongExactnessReport};
pub use field::{variable_field_homogeneity, FieldFragment, FieldReport, Images};
pub use presentations::{Presentations, TermTuple};
pub use sets::{FiniteSet, FiniteSets, Injection};
pub use triviality::{triviality_test, TheoryTag, TrivialityReport};
pub use vector::{LinearEmbedding, VectorSpace, VectorSpaces};

#[derive(Debug, thiserror::Error)]
pub enum FraisseError {
    #[error("amalgamation failed mid-chain on span {0}")]
    Amalgamation(serde_json::Value),
    #[error("the presentation with relations [{0}] proves bottom")]
    Refuted(String),
    #[error("{0}")]
    Context(String),
    #[error(transparent)]
    Presentation(#[from] presentation::PresentationError),
    #[error(transparent)]
    Engine(#[from] sequent_engine::EngineError),
}
