//! Finitely generated models given by generators and relations: the vanishing
//! set `S`, the independence data `U`, the models they present and the maps
//! between them.

mod build;
mod error;
mod homs;
mod irreducible;
mod models;
mod preimage;
mod present;

pub use build::{build_presented_model, PresentedModel};
pub use error::PresentationError;
pub use homs::{hom_set, pushforward, HomFilter, HomSet, HOM_TUPLE_CAP};
pub use irreducible::{is_irreducible, Irreducibility};
pub use models::{initial_model, scalar_model, ScalarModel};
pub use preimage::{extend_by_preimage, Extension};
pub use present::{generated_submodel, kernel_generators, Membership, Presentation, Realization, DEFAULT_DEPTH};
pub use sequent_engine::ModelHom;
