//! Provability of algebraic sequents in the exactness-closed theory: forward
//! saturation for proofs, sampled exact representations for countermodels.

pub mod arrow;
pub mod closure;
pub mod eval;
pub mod homs;
pub mod instances;
pub mod model;
pub mod prove;
pub mod random;
pub mod saturate;
pub mod submodel;
pub mod theory;
pub mod trace;

pub use arrow::Arrow;
pub use eval::{counterexample, eval_sequent, fails_at};
pub use homs::{hom_space, HomSpace, ModelHom};
pub use model::{Assignment, LinearModel, ModelError};
pub use prove::{prove_in_i, Budget, EngineError, Exhausted, Verdict, Witness};
pub use random::{random_exact_model, task_rng, Dims, RandomModelError};
pub use saturate::{derive, proves_zero, saturate, saturate_with_cap};
pub use submodel::{generated_submodel, Submodel};
pub use theory::{Relation, Rule, RuleKind, Theory};
pub use trace::{Finish, ReplayError, Step, StepKind, Trace};
