//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by constructors, decompositions, and channel operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Incompatible dimensions (matrix products, tensor reshapes, subsystem lists).
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An operation requiring a Hermitian input received a non-Hermitian matrix.
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    /// An operation requiring a positive semidefinite input found an eigenvalue
    /// below the tolerated floor.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    /// A domain value violated its declared invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The operation annihilates the given state, so the normalized output
    /// (and any reversal of it) is undefined.
    #[error("operation has vanishing probability on the given state")]
    ZeroProbability,

    /// Condition 2 failed: the operation is not unitarily reversible on the subspace.
    #[error("not unitarily reversible on the subspace (residual {residual:.3e}, mu^2 {mu_squared:.3e})")]
    NotReversible { residual: f64, mu_squared: f64 },

    /// Every outcome of a measurement has probability below the sampling floor.
    #[error("degenerate measurement: all outcome probabilities vanish")]
    DegenerateMeasurement,

    /// Outcome index beyond the number of outcomes.
    #[error("outcome index {index} out of range ({len} outcomes)")]
    OutcomeIndex { index: usize, len: usize },

    /// A randomized construction could not satisfy its constraints.
    #[error("construction infeasible: {0}")]
    Infeasible(String),
}

pub type Result<V> = std::result::Result<V, Error>;
