//! Shared error type for every fallible operation in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode a caller can hit. Variants carry enough context to
/// report the violation without re-deriving it from the inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand shapes are incompatible, or a shape precondition failed.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A row that must be a probability distribution is not one.
    #[error("row {row} is not a probability distribution: {reason}")]
    Stochasticity { row: usize, reason: String },

    /// Gaussian elimination hit a pivot below threshold.
    #[error("matrix is singular: pivot {pivot:.3e} at column {column} is below threshold")]
    SingularMatrix { column: usize, pivot: f64 },

    /// A scalar argument lies outside the documented domain.
    #[error("domain violation: {0}")]
    Domain(String),

    /// A contingency table cannot support the requested computation.
    #[error("degenerate table: {0}")]
    DegenerateTable(String),

    /// State labels are missing, duplicated, or inconsistent between axes.
    #[error("label error: {0}")]
    Label(String),

    /// The chain has no unique limiting distribution (reducible or periodic).
    #[error("no unique limiting distribution: {0}")]
    NoUniqueLimit(String),

    /// Expected sojourn diverges because the state never exits.
    #[error("expected sojourn in state '{state}' is infinite (no exit probability)")]
    InfiniteSojourn { state: String },

    /// An iterative computation hit its iteration cap.
    #[error("no convergence within {limit} iterations: {context}")]
    Convergence { limit: usize, context: String },

    /// Absorption analysis requires at least one absorbing state.
    #[error("chain has no absorbing state")]
    NoAbsorbingState,

    /// Some transient state cannot reach any absorbing state.
    #[error("chain is not absorbing: {0}")]
    NonAbsorbingChain(String),

    /// Too few observations to compute the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
