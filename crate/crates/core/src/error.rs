use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoopError {
    #[error("invalid lattice size: {0}")]
    InvalidSize(String),

    #[error("budget exceeded: estimated {estimated} states against a budget of {budget}")]
    BudgetExceeded { estimated: u64, budget: u64 },

    #[error("invalid vertex id {0}")]
    InvalidVertex(usize),

    #[error("invalid face id {0}")]
    InvalidFace(usize),

    #[error("faces {0} and {1} are not an adjacent pair of this geometry")]
    NotAdjacent(usize, usize),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("configuration has vertex defects")]
    HasDefects,

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("label {0} has no straight-loop representative on this geometry")]
    Unrealizable(String),

    #[error("empty component or sector")]
    Empty,

    #[error("operator dimension {dim} exceeds the dense threshold {threshold}")]
    DimensionTooLarge { dim: usize, threshold: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("least-squares design matrix is degenerate")]
    DegenerateFit,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, LoopError>;
