use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty point set")]
    Empty,

    #[error("noise amplitude {tau} is not below the tube radius {limit} of the model")]
    TubeTooWide { tau: f64, limit: f64 },

    #[error("projection of {point:?} is ambiguous: {reason}")]
    AmbiguousProjection { point: Vec<f64>, reason: String },

    #[error("maximal clique budget of {budget} exceeded (at least {found} cliques)")]
    CliqueBudget { budget: usize, found: usize },

    #[error("map is not simplicial: {0}")]
    NotSimplicial(String),

    #[error("scale ordering violated: source scale {source_scale} exceeds target scale {target_scale}")]
    ScaleOrder { source_scale: f64, target_scale: f64 },

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("simplex {0:?} is not in the complex")]
    MissingSimplex(Vec<usize>),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("raster oracle inconclusive: {0}")]
    Inconclusive(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
