//! Learning signed graphs from smooth signals.
//!
//! A signed graph carries positive edges (similarity) and negative edges
//! (dissimilarity). Signals that vary smoothly over such a graph are aligned
//! with the low end of the spectrum of its *net Laplacian* `L = D_net - A`,
//! where `D_net` is the diagonal of net degrees (positive minus negative).
//! This crate recovers the signed topology from a matrix of such signals by
//! minimizing the net-Laplacian smoothness of the data over the split
//! `L = L⁺ - L⁻` of the net Laplacian into ordinary-Laplacian parts, subject
//! to trace and disjoint-support constraints, via ADMM.
//!
//! Module map:
//! - [`graph`]: signed graph container, adjacency/Laplacian assembly, balance.
//! - [`halfvec`]: strictly-upper-triangle vectorization and the `Q` operator
//!   that links edge space to node degrees.
//! - [`eigh`]: self-contained symmetric eigendecomposition (works for any
//!   scalar implementing [`Scalar`]).
//! - [`gsp`]: net-Laplacian spectrum, graph Fourier transform, smoothness
//!   measures, low-pass spectral filters.
//! - [`solver`]: the ADMM solver in full pair space, plus the reduced
//!   candidate-edge variant for large graphs ([`solver::fast`]).
//! - [`datagen`]: synthetic signed graphs (ER/BA with polarity signs, signed
//!   geometric graphs) and filtered smooth signals with controlled noise.
//! - [`metrics`]: sign classification, macro F1, ranking (AUPRC) metrics,
//!   Laplacian estimation error, and regularization grid search.
//! - [`io`]: small text formats for graphs, matrices, pair lists and results.
//!
//! All numeric code is generic over the scalar type through the [`Scalar`]
//! trait (`f32` or `f64`); the crate root re-exports `f64` aliases for the
//! common types, which is what the command-line tools use.

pub mod datagen;
pub mod eigh;
pub mod error;
pub mod graph;
pub mod gsp;
pub mod halfvec;
pub mod io;
pub mod metrics;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Signed graph with `f64` weights.
pub type SignedGraph64 = graph::SignedGraph<f64>;
/// Signed graph with `f32` weights.
pub type SignedGraph32 = graph::SignedGraph<f32>;
/// Edge-space vector (strictly upper triangle) over `f64`.
pub type EdgeVector64 = halfvec::EdgeVector<f64>;
/// Edge-space vector (strictly upper triangle) over `f32`.
pub type EdgeVector32 = halfvec::EdgeVector<f32>;
/// Split Laplacian estimate (`ℓ⁺`, `ℓ⁻`) over `f64`.
pub type LaplacianPair64 = halfvec::LaplacianPairVec<f64>;
/// Net-Laplacian spectrum over `f64`.
pub type NetSpectrum64 = gsp::NetSpectrum<f64>;
/// Solver output over `f64`.
pub type SolveResult64 = solver::SolveResult<f64>;

/// Deterministic generator for unit tests.
#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
