use thiserror::Error;

/// Errors raised while building or solving a slab transport problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angular grid: {0}")]
    InvalidAngularGrid(String),

    #[error("invalid spatial mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("{0}")]
    CrossSections(#[from] crate::spatial::CrossSectionViolation),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite: pivot {pivot} = {value:e} in {context}")]
    NotPositiveDefinite {
        context: &'static str,
        pivot: usize,
        value: f64,
    },

    #[error("energy form is negative: a(u,u) = {value:e}")]
    NegativeEnergy { value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
