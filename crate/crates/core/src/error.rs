use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular linear system: pivot magnitude {pivot:e} below threshold")]
    SingularSystem { pivot: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix rows are not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("operator `{0}` has no single-valued forward evaluation")]
    NotSingleValued(String),

    #[error("incompatible solver configuration: {0}")]
    IncompatibleForm(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("generated problem is rank deficient (min singular value {min_singular:e})")]
    RankDeficient { min_singular: f64 },

    #[error("unknown problem name `{0}`")]
    InvalidName(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("subproblem oracle failed: {0}")]
    Oracle(String),

    #[error("malformed archive: {0}")]
    Archive(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
