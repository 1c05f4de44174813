//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used by every fallible function in the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by graph construction, spectral analysis, the solvers,
/// data generation, metrics and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix that must be square is not.
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// A matrix that must be symmetric deviates from its transpose by more
    /// than the stated tolerance (both reported in absolute terms).
    #[error("matrix is not symmetric: max |M - Mᵀ| = {max_dev:.3e} exceeds {tol:.3e}")]
    NotSymmetric { max_dev: f64, tol: f64 },

    /// `(i, j)` is not a strictly-upper node pair for an `n`-node graph.
    #[error("invalid node pair ({i}, {j}) for n = {n}: need 0 <= i < j < n")]
    InvalidPair { i: usize, j: usize, n: usize },

    /// Two objects that must agree on a dimension do not.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A scalar or structural parameter is outside its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An edge list is malformed (duplicate pair, nonpositive weight, ...).
    #[error("invalid edge ({i}, {j}): {reason}")]
    InvalidEdge { i: usize, j: usize, reason: String },

    /// The trace and disjoint-support constraints admit no solution for
    /// graphs this small; learning needs at least 3 nodes.
    #[error("problem infeasible for n = {n}: split-Laplacian learning needs n >= 3")]
    Infeasible { n: usize },

    /// The signal matrix has no columns.
    #[error("empty signal matrix: need at least one signal column")]
    EmptySignals,

    /// The iterative eigensolver failed to isolate an eigenvalue.
    #[error("eigendecomposition failed: off-diagonal {index} not annihilated after {iterations} iterations")]
    EigenFailure { index: usize, iterations: usize },

    /// A fixed spectral shift is too small to make the shifted net Laplacian
    /// positive semidefinite.
    #[error("shift gamma = {gamma:.6e} is smaller than |lambda_min| = {required:.6e}")]
    ShiftTooSmall { gamma: f64, required: f64 },

    /// The ADMM iteration produced a non-finite value.
    #[error("solver diverged: non-finite iterate at iteration {iteration}")]
    Diverged { iteration: usize },

    /// The inner conjugate-gradient solve stalled.
    #[error("conjugate gradient stalled: residual {residual:.3e} above tolerance {tol:.1e} after {iterations} iterations")]
    CgStalled {
        residual: f64,
        tol: f64,
        iterations: usize,
    },

    /// The candidate edge set is too small to carry the trace constraint.
    #[error("candidate edge set has {size} pair(s); the reduced problem needs at least 2")]
    CandidateSetTooSmall { size: usize },

    /// A ranking metric is undefined because the ground truth has no edges.
    #[error("metric undefined: ground truth has no positive and no negative edges")]
    UndefinedMetric,

    /// A text artifact failed to parse; `line` is 1-based.
    #[error("parse error at {path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    /// Underlying I/O failure.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Helper for parameter-domain errors.
    pub fn invalid_parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
