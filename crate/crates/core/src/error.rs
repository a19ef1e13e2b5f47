use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, DriftError>;

/// Errors produced by cloud validation, fitting, and metric evaluation.
///
/// Variant names are stable: the CLI surfaces them verbatim in diagnostics,
/// so scripts can match on them.
#[derive(Debug, Error)]
pub enum DriftError {
    #[error("NonFinite: entry at row {row}, column {col} is NaN or infinite")]
    NonFinite { row: usize, col: usize },

    #[error("EmptyCloud: a point cloud needs at least one point")]
    EmptyCloud,

    #[error("ShapeMismatch: {what} has length {actual}, expected {expected}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("TooFewPoints: need at least {needed} points, got {actual}")]
    TooFewPoints { needed: usize, actual: usize },

    #[error("DimensionMismatch: expected dimension {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("EmptyField: force field has no forces")]
    EmptyField,

    #[error("EmptySample: sample vector is empty")]
    EmptySample,

    #[error("EmptyText: tokenized text has no tokens")]
    EmptyText,

    #[error("EmptyVocabulary: no token could be embedded")]
    EmptyVocabulary,

    #[error("EmptyEvaluationSet: strain evaluation needs at least one point")]
    EmptyEvaluationSet,

    #[error("ZeroVector: cosine deformation is undefined for zero vectors")]
    ZeroVector,

    #[error("NotADistribution: {0}")]
    NotADistribution(String),

    #[error("BadRank: rank {rank} is outside 1..={dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("Io: {0}")]
    Io(#[from] std::io::Error),

    #[error("Parse: cell at row {row}, column {col} is not a number")]
    Parse { row: usize, col: usize },

    #[error("RaggedRows: row {row} has {actual} cells, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        actual: usize,
    },

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("Internal: {0}")]
    Internal(String),
}
