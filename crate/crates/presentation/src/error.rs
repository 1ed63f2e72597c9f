use sequent_engine::{EngineError, ModelError, RandomModelError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PresentationError {
    #[error("{0} is not a term over the presentation's context")]
    Context(String),
    #[error("the presented fragment does not close within {depth} compositions")]
    Truncated { depth: usize },
    #[error("independence conditions need a coefficient field larger than the rationals")]
    NotRational,
    #[error("the relations prove 1 = 0")]
    Inconsistent,
    #[error("the element is not killed by the second leg of the pair")]
    NotInKernel,
    #[error("the model is not generated by the given element")]
    NotGenerated,
    #[error("malformed presentation: {0}")]
    Json(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Random(#[from] RandomModelError),
}
