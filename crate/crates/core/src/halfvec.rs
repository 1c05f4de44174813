//! Strictly-upper-triangle vectorization of symmetric matrices, and the
//! degree-accumulation operator `Q` that connects edge space to node space.
//!
//! An `n`-node symmetric matrix with irrelevant diagonal is stored as a
//! vector of its `d = n(n-1)/2` strictly-upper entries in row-major pair
//! order `(0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1)`. The operator
//! `Q : R^d -> R^n` sums, for every node, the entries of all pairs that
//! contain it (for a weight vector this is the degree vector); its adjoint
//! `Qᵀ : R^n -> R^d` sends node values `u` to `u_i + u_j` on pair `(i, j)`.
//! Both are applied implicitly in `O(n^2)`; `Q` is never materialized
//! outside of tests.
//!
//! Useful closed forms (used by the solvers):
//! `QQᵀ = (n-2)I + 11ᵀ`, and `QᵀQ` has diagonal 2 with off-diagonal 1
//! exactly when two pairs share one endpoint.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative tolerance for the symmetry check in [`upper`].
pub const SYMMETRY_RTOL: f64 = 1e-10;

/// Number of strictly-upper pairs of an `n`-node graph: `n(n-1)/2`.
pub fn edge_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of pair `(i, j)` (with `i < j < n`) in row-major pair order.
pub fn edge_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i >= j || j >= n {
        return Err(Error::InvalidPair { i, j, n });
    }
    Ok(i * n - i * (i + 1) / 2 + (j - i - 1))
}

/// Inverse of [`edge_index`]: the pair stored at position `e`.
///
/// # Panics
/// Panics if `e >= edge_count(n)`.
pub fn index_pair(e: usize, n: usize) -> (usize, usize) {
    let d = edge_count(n);
    assert!(e < d, "pair index {e} out of range for n = {n}");
    // Initial guess for the row from the quadratic cumulative-count formula,
    // then correct by at most one step to absorb floating-point error.
    let ef = e as f64;
    let nf = n as f64;
    let mut i = (nf - 0.5 - ((nf - 0.5).powi(2) - 2.0 * ef).sqrt()).floor() as usize;
    i = i.min(n - 2);
    let row_start = |i: usize| i * n - i * (i + 1) / 2;
    while row_start(i) > e {
        i -= 1;
    }
    while i + 1 <= n - 2 && row_start(i + 1) <= e {
        i += 1;
    }
    let j = e - row_start(i) + i + 1;
    (i, j)
}

/// Iterates all strictly-upper pairs of an `n`-node graph in storage order.
pub fn pair_iter(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Vector indexed by strictly-upper node pairs of an `n`-node graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVector<S> {
    n: usize,
    data: Array1<S>,
}

impl<S: Scalar> EdgeVector<S> {
    /// All-zero vector for an `n`-node graph.
    pub fn zeros(n: usize) -> Self {
        EdgeVector {
            n,
            data: Array1::zeros(edge_count(n)),
        }
    }

    /// Wraps `data`, which must have length `n(n-1)/2`.
    pub fn from_array(n: usize, data: Array1<S>) -> Result<Self> {
        if data.len() != edge_count(n) {
            return Err(Error::DimensionMismatch {
                context: "edge vector length",
                expected: edge_count(n),
                got: data.len(),
            });
        }
        Ok(EdgeVector { n, data })
    }

    /// Number of nodes of the underlying graph.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of stored pairs, `n(n-1)/2`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// True when the graph has fewer than two nodes (no pairs).
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Entry for pair `(i, j)`, `i < j`.
    pub fn get(&self, i: usize, j: usize) -> Result<S> {
        Ok(self.data[edge_index(i, j, self.n)?])
    }

    /// Sets the entry for pair `(i, j)`, `i < j`.
    pub fn set(&mut self, i: usize, j: usize, value: S) -> Result<()> {
        let e = edge_index(i, j, self.n)?;
        self.data[e] = value;
        Ok(())
    }

    /// Underlying storage in pair order.
    pub fn array(&self) -> &Array1<S> {
        &self.data
    }

    /// Mutable underlying storage in pair order.
    pub fn array_mut(&mut self) -> &mut Array1<S> {
        &mut self.data
    }

    /// Consumes the vector, returning the underlying storage.
    pub fn into_array(self) -> Array1<S> {
        self.data
    }

    /// Sum of all entries.
    pub fn sum(&self) -> S {
        self.data.sum()
    }
}

/// Extracts the strictly-upper entries of a symmetric matrix in pair order.
///
/// The matrix must be square and symmetric within [`SYMMETRY_RTOL`] relative
/// to its largest absolute entry; the off-diagonal values are averaged with
/// their transposes so tiny asymmetries below the tolerance do not leak into
/// downstream computations.
pub fn upper<S: Scalar>(m: &Array2<S>) -> Result<EdgeVector<S>> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    let mut max_abs = S::zero();
    let mut max_dev = S::zero();
    for i in 0..n {
        for j in 0..n {
            max_abs = max_abs.max(m[[i, j]].abs());
            if i < j {
                max_dev = max_dev.max((m[[i, j]] - m[[j, i]]).abs());
            }
        }
    }
    let tol = S::from_f64_lossy(SYMMETRY_RTOL) * max_abs.max(S::one());
    if max_dev > tol {
        return Err(Error::NotSymmetric {
            max_dev: max_dev.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }
    let mut out = EdgeVector::zeros(n);
    let half = S::from_f64_lossy(0.5);
    for (e, (i, j)) in pair_iter(n).enumerate() {
        out.data[e] = (m[[i, j]] + m[[j, i]]) * half;
    }
    Ok(out)
}

/// Applies the degree-accumulation operator: `(Qv)_i = Σ_{j≠i} v_(i,j)`.
///
/// For a symmetric matrix `X` with `v = upper(X)` this equals the row sums
/// of `X` with the diagonal removed.
pub fn apply_q<S: Scalar>(v: &EdgeVector<S>) -> Array1<S> {
    accumulate_pairs(v.data.view(), v.n)
}

/// Applies the adjoint of [`apply_q`]: `(Qᵀu)_(i,j) = u_i + u_j`.
pub fn apply_qt<S: Scalar>(u: ArrayView1<'_, S>, n: usize) -> Result<EdgeVector<S>> {
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            context: "node vector length",
            expected: n,
            got: u.len(),
        });
    }
    Ok(EdgeVector {
        n,
        data: spread_nodes(u, n),
    })
}

/// Raw-array form of [`apply_q`]; `v` must have length `n(n-1)/2`.
pub(crate) fn accumulate_pairs<S: Scalar>(v: ArrayView1<'_, S>, n: usize) -> Array1<S> {
    debug_assert_eq!(v.len(), edge_count(n));
    let mut out = Array1::zeros(n);
    for (e, (i, j)) in pair_iter(n).enumerate() {
        let x = v[e];
        out[i] += x;
        out[j] += x;
    }
    out
}

/// Raw-array form of [`apply_qt`]; `u` must have length `n`.
pub(crate) fn spread_nodes<S: Scalar>(u: ArrayView1<'_, S>, n: usize) -> Array1<S> {
    debug_assert_eq!(u.len(), n);
    let mut out = Array1::zeros(edge_count(n));
    for (e, (i, j)) in pair_iter(n).enumerate() {
        out[e] = u[i] + u[j];
    }
    out
}

/// Split Laplacian estimate in edge space: `ℓ⁺` and `ℓ⁻` hold the (negated)
/// off-diagonal entries of two ordinary Laplacians whose difference is the
/// learned net Laplacian.
///
/// A valid pair is elementwise nonpositive, sums to `-n` on each side (a
/// trace normalization that rules out the zero graph), and has disjoint
/// supports (no pair is simultaneously a positive and a negative edge).
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianPairVec<S> {
    pub lpos: EdgeVector<S>,
    pub lneg: EdgeVector<S>,
}

impl<S: Scalar> LaplacianPairVec<S> {
    /// Builds a pair after checking that both sides describe the same graph.
    pub fn new(lpos: EdgeVector<S>, lneg: EdgeVector<S>) -> Result<Self> {
        if lpos.node_count() != lneg.node_count() {
            return Err(Error::DimensionMismatch {
                context: "laplacian pair node counts",
                expected: lpos.node_count(),
                got: lneg.node_count(),
            });
        }
        Ok(LaplacianPairVec { lpos, lneg })
    }

    /// Number of nodes of the underlying graph.
    pub fn node_count(&self) -> usize {
        self.lpos.node_count()
    }

    /// Checks the pair invariants: each side sums to `-n` within
    /// `trace_tol`, every entry is `<= nonpos_tol`, and no pair index is
    /// nonzero on both sides (complementarity is exact, not approximate).
    pub fn validate(&self, trace_tol: S, nonpos_tol: S) -> Result<()> {
        let n = S::from_f64_lossy(self.node_count() as f64);
        for (name, side) in [("lpos", &self.lpos), ("lneg", &self.lneg)] {
            let gap = (side.sum() + n).abs();
            if gap > trace_tol {
                return Err(Error::invalid_parameter(
                    "laplacian pair",
                    format!("{name} sums to {} (target {}): gap {gap}", side.sum(), -n),
                ));
            }
            if side.data.iter().any(|&x| x > nonpos_tol) {
                return Err(Error::invalid_parameter(
                    "laplacian pair",
                    format!("{name} has an entry above the nonpositivity tolerance"),
                ));
            }
        }
        let overlap = self
            .lpos
            .data
            .iter()
            .zip(self.lneg.data.iter())
            .any(|(&p, &q)| p != S::zero() && q != S::zero());
        if overlap {
            return Err(Error::invalid_parameter(
                "laplacian pair",
                "supports of lpos and lneg overlap",
            ));
        }
        Ok(())
    }
}

/// Assembles `(L⁺, L⁻, Â)` from a split pair: the two dense Laplacian
/// halves and the signed adjacency they describe.
///
/// Laplacian off-diagonals are the stored pair entries; each diagonal is
/// set to the negated row sum, so both `L⁺` and `L⁻` have exactly zero row
/// sums. The adjacency flips the off-diagonals back into weights,
/// `Â_ij = −L⁺_ij + L⁻_ij`, carrying positive edges from `L⁺` and negative
/// edges from `L⁻` on a zero diagonal.
pub fn laplacians_from_vec<S: Scalar>(
    pair: &LaplacianPairVec<S>,
) -> (Array2<S>, Array2<S>, Array2<S>) {
    let n = pair.node_count();
    let mut lpos = Array2::zeros((n, n));
    let mut lneg = Array2::zeros((n, n));
    let mut adj = Array2::zeros((n, n));
    for (e, (i, j)) in pair_iter(n).enumerate() {
        let p = pair.lpos.data[e];
        let q = pair.lneg.data[e];
        lpos[[i, j]] = p;
        lpos[[j, i]] = p;
        lneg[[i, j]] = q;
        lneg[[j, i]] = q;
        let w = -p + q;
        adj[[i, j]] = w;
        adj[[j, i]] = w;
    }
    for m in [&mut lpos, &mut lneg] {
        for i in 0..n {
            let mut row = S::zero();
            for j in 0..n {
                if j != i {
                    row += m[[i, j]];
                }
            }
            m[[i, i]] = -row;
        }
    }
    (lpos, lneg, adj)
}
