//! Quiver fragments, their description language, terms in normal form and base axioms.

pub mod axioms;
pub mod dsl;
pub mod field;
pub mod linalg;
pub mod quiver;
pub mod scalar;
pub mod sequent;
pub mod term;
pub mod translate;

pub use axioms::{base_axioms, ArrowRelation, Axiom, AxiomKind, BaseAxioms, IndependenceAssertion};
pub use dsl::{parse_quiver, DslError};
pub use field::{CoefficientField, Poly, RatFunc};
pub use linalg::{Matrix, Subspace};
pub use quiver::{
    Composite, Edge, EdgeId, EdgeKind, Point, Quiver, QuiverBuilder, QuiverError, Sort, SortId, SortKind, StructuralKind,
};
pub use scalar::{Field, Q};
pub use sequent::{parse_sequent, AlgebraicSequent, Conclusion, DiersAtom, SequentError};
pub use term::{
    normalize_path, normalize_term, parse_raw_term, parse_term, Atom, Context, Monomial, RawTerm, Term, TermError, Var,
};
pub use translate::{translate_term, SortTranslation, TranslateError};
