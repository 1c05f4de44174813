//! Reduced solver over a candidate edge set.
//!
//! The full solver optimises over all `n(n−1)/2` node pairs, which dominates
//! both memory and per-iteration cost for large `n`. Most of those pairs are
//! never part of the recovered graph: strong positive ties arise between
//! rows of `X` that are unusually close, strong negative ties between rows
//! that are unusually far apart. This module restricts the problem to the
//! union of each node's `k` nearest and `k` farthest peers (by Euclidean row
//! distance) and runs the same splitting iteration on the reduced
//! coordinates. Entries outside the candidate set are exactly zero in the
//! result.
//!
//! On the reduced space the node-coupling matrix `Q̃Q̃ᵀ = D_a + A_a` (candidate
//! degrees plus candidate adjacency) is sparse and no longer has a closed-form
//! inverse, so the node solve becomes a warm-started, Jacobi-preconditioned
//! conjugate-gradient iteration.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::halfvec::{edge_index, EdgeVector};
use crate::scalar::Scalar;
use crate::solver::{
    apply_minv, assemble_result, drive, AdmmConfig, AdmmState, IterationDiag, PairSpace,
    SolveResult, StopRule, NODE_SOLVE_SLOTS, SLOT_SETUP,
};

/// Relative residual target of the inner conjugate-gradient solves.
///
/// The effective target is `max(CG_RTOL, 4·ε_S)` for scalar type `S`, so the
/// stated value binds for `f64` while `f32` runs at the best tolerance its
/// precision supports.
pub const CG_RTOL: f64 = 1e-10;

/// Iteration cap of the inner conjugate gradient, as a multiple of `n`.
pub const CG_MAX_ITER_FACTOR: usize = 10;

// ---------------------------------------------------------------------------
// Candidate edge sets
// ---------------------------------------------------------------------------

/// How a pair entered the candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Among the `k` nearest of at least one endpoint, never among the
    /// farthest.
    Near,
    /// Among the `k` farthest of at least one endpoint, never among the
    /// nearest.
    Far,
    /// Selected by both rules (possibly at different endpoints).
    Both,
    /// Supplied explicitly rather than by neighbor search.
    Given,
}

/// A sparse, sorted, duplicate-free set of node pairs `(i, j)` with `i < j`.
#[derive(Debug, Clone)]
pub struct CandidateEdgeSet {
    n: usize,
    pairs: Vec<(usize, usize)>,
    origins: Vec<Origin>,
}

impl CandidateEdgeSet {
    /// Builds a set from explicit pairs. Pairs are normalised to `i < j`,
    /// sorted lexicographically and deduplicated; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid_parameter(
                "n",
                "a pair space needs at least 2 nodes",
            ));
        }
        let mut normalised = Vec::new();
        for (i, j) in pairs {
            if i == j || i >= n || j >= n {
                return Err(Error::InvalidPair {
                    i,
                    j,
                    n,
                });
            }
            normalised.push((i.min(j), i.max(j)));
        }
        normalised.sort_unstable();
        normalised.dedup();
        let origins = vec![Origin::Given; normalised.len()];
        Ok(Self {
            n,
            pairs: normalised,
            origins,
        })
    }

    /// The complete pair set on `n` nodes (used to cross-check the reduced
    /// solver against the full one).
    pub fn all_pairs(n: usize) -> Result<Self> {
        Self::from_pairs(n, crate::halfvec::pair_iter(n))
    }

    /// Number of nodes of the underlying graph.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of candidate pairs.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// Whether the set holds no pairs.
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The pairs in lexicographic order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Provenance of each pair, parallel to [`pairs`](Self::pairs).
    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    /// Whether `(i, j)` (in either order) is a candidate.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.pairs.binary_search(&key).is_ok()
    }

    /// Scatters reduced coordinates into a full pair-space vector; entries
    /// outside the candidate set are exactly zero.
    pub fn expand<S: Scalar>(&self, reduced: &Array1<S>) -> Result<EdgeVector<S>> {
        if reduced.len() != self.pairs.len() {
            return Err(Error::DimensionMismatch {
                context: "reduced vector length",
                expected: self.pairs.len(),
                got: reduced.len(),
            });
        }
        let mut full = EdgeVector::zeros(self.n);
        for (idx, &(i, j)) in self.pairs.iter().enumerate() {
            let e = edge_index(i, j, self.n)?;
            full.array_mut()[e] = reduced[idx];
        }
        Ok(full)
    }

    /// Gathers the candidate entries of a full pair-space vector.
    pub fn restrict<S: Scalar>(&self, full: &EdgeVector<S>) -> Result<Array1<S>> {
        if full.node_count() != self.n {
            return Err(Error::DimensionMismatch {
                context: "pair vector node count",
                expected: self.n,
                got: full.node_count(),
            });
        }
        let mut reduced = Array1::zeros(self.pairs.len());
        for (idx, &(i, j)) in self.pairs.iter().enumerate() {
            reduced[idx] = full.array()[edge_index(i, j, self.n)?];
        }
        Ok(reduced)
    }
}

// ---------------------------------------------------------------------------
// Neighbor search
// ---------------------------------------------------------------------------

/// Source of per-node nearest/farthest peers for candidate construction.
pub trait NeighborProvider {
    /// Number of nodes.
    fn node_count(&self) -> usize;

    /// Returns the `k` nearest and `k` farthest peers of node `i`.
    ///
    /// Nearest peers are ordered by increasing distance, farthest by
    /// decreasing distance; equal distances are broken by smaller index so
    /// the result is deterministic.
    fn neighbors(&self, i: usize, k: usize) -> (Vec<usize>, Vec<usize>);
}

/// Exhaustive neighbor search over the rows of a signal matrix.
///
/// Distances are squared Euclidean distances between rows — the same
/// quantity (up to sign) as the pairwise smoothness costs, so the candidate
/// set keys on exactly what the objective sees.
pub struct BruteForceNeighbors<'a, S> {
    x: &'a Array2<S>,
}

impl<'a, S: Scalar> BruteForceNeighbors<'a, S> {
    /// Wraps a signal matrix with one row per node.
    pub fn new(x: &'a Array2<S>) -> Result<Self> {
        if x.nrows() < 2 {
            return Err(Error::invalid_parameter(
                "signals",
                "neighbor search needs at least 2 rows",
            ));
        }
        if x.ncols() == 0 {
            return Err(Error::EmptySignals);
        }
        Ok(Self { x })
    }

    fn squared_distance(&self, i: usize, j: usize) -> f64 {
        let ri = self.x.row(i);
        let rj = self.x.row(j);
        let mut acc = S::zero();
        for (&a, &b) in ri.iter().zip(rj.iter()) {
            let diff = a - b;
            acc += diff * diff;
        }
        acc.to_f64_lossy()
    }
}

impl<S: Scalar> NeighborProvider for BruteForceNeighbors<'_, S> {
    fn node_count(&self) -> usize {
        self.x.nrows()
    }

    fn neighbors(&self, i: usize, k: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let mut order: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (self.squared_distance(i, j), j))
            .collect();
        // total_cmp keeps the sort deterministic even for degenerate input.
        order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let near: Vec<usize> = order.iter().take(k).map(|&(_, j)| j).collect();
        let mut far_order = order;
        far_order.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let far: Vec<usize> = far_order.iter().take(k).map(|&(_, j)| j).collect();
        (near, far)
    }
}

/// Builds the candidate edge set: the union over all nodes of each node's
/// `k` nearest and `k` farthest peers.
///
/// `k` must lie in `[1, n−1]`. The result is sorted, duplicate-free and
/// carries per-pair provenance.
pub fn build_candidates<P: NeighborProvider + Sync>(
    provider: &P,
    k: usize,
) -> Result<CandidateEdgeSet> {
    let n = provider.node_count();
    if n < 2 {
        return Err(Error::invalid_parameter(
            "n",
            "candidate search needs at least 2 nodes",
        ));
    }
    if k == 0 || k > n - 1 {
        return Err(Error::invalid_parameter(
            "k",
            "neighbor count must lie in [1, n-1]",
        ));
    }
    let per_node: Vec<(Vec<usize>, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|i| provider.neighbors(i, k))
        .collect();
    // (near?, far?) flags per pair; BTreeMap keeps the final order stable.
    let mut flags: BTreeMap<(usize, usize), (bool, bool)> = BTreeMap::new();
    for (i, (near, far)) in per_node.iter().enumerate() {
        for &j in near {
            let entry = flags.entry((i.min(j), i.max(j))).or_insert((false, false));
            entry.0 = true;
        }
        for &j in far {
            let entry = flags.entry((i.min(j), i.max(j))).or_insert((false, false));
            entry.1 = true;
        }
    }
    let mut pairs = Vec::with_capacity(flags.len());
    let mut origins = Vec::with_capacity(flags.len());
    for ((i, j), (near, far)) in flags {
        pairs.push((i, j));
        origins.push(match (near, far) {
            (true, false) => Origin::Near,
            (false, true) => Origin::Far,
            (true, true) => Origin::Both,
            (false, false) => unreachable!("pair inserted without a rule"),
        });
    }
    Ok(CandidateEdgeSet {
        n,
        pairs,
        origins,
    })
}

/// Picks the neighbor count from the edge densities of a reference graph.
///
/// With `e⁺` positive and `e⁻` negative edges on `n` nodes, the denser sign
/// has about `max(e⁺, e⁻)/n` edges per node; multiplying by the safety
/// factor `β > 1` and rounding up gives a per-node neighbor budget that
/// covers the true edges with slack. The result is clamped to `[1, n−1]`.
pub fn choose_k(n: usize, pos_edges: usize, neg_edges: usize, beta: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::invalid_parameter(
            "n",
            "neighbor budget needs at least 2 nodes",
        ));
    }
    if !beta.is_finite() || beta <= 1.0 {
        return Err(Error::invalid_parameter(
            "beta",
            "safety factor must be finite and > 1",
        ));
    }
    if pos_edges == 0 && neg_edges == 0 {
        return Err(Error::invalid_parameter(
            "edges",
            "reference graph has no edges",
        ));
    }
    let densest = pos_edges.max(neg_edges) as f64 / n as f64;
    let k = (beta * densest).ceil() as usize;
    Ok(k.clamp(1, n - 1))
}

// ---------------------------------------------------------------------------
// Reduced pair space
// ---------------------------------------------------------------------------

/// Pair space restricted to a candidate set, with a sparse CG node solve.
pub(crate) struct CandidateSpace<S> {
    n: usize,
    pairs: Vec<(usize, usize)>,
    /// CSR adjacency of the candidate graph (unit weights).
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    /// Candidate degree per node.
    degree: Vec<S>,
    /// Warm starts for the node solves, one per call site.
    warm: Vec<Array1<S>>,
}

impl<S: Scalar> CandidateSpace<S> {
    pub(crate) fn new(set: &CandidateEdgeSet) -> Result<Self> {
        let n = set.node_count();
        if n < 3 {
            return Err(Error::Infeasible { n });
        }
        if set.len() < 2 {
            return Err(Error::CandidateSetTooSmall { size: set.len() });
        }
        let mut degree_counts = vec![0usize; n];
        for &(i, j) in set.pairs() {
            degree_counts[i] += 1;
            degree_counts[j] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for u in 0..n {
            row_ptr[u + 1] = row_ptr[u] + degree_counts[u];
        }
        let mut col_idx = vec![0usize; 2 * set.len()];
        let mut cursor = row_ptr.clone();
        for &(i, j) in set.pairs() {
            col_idx[cursor[i]] = j;
            cursor[i] += 1;
            col_idx[cursor[j]] = i;
            cursor[j] += 1;
        }
        let degree = degree_counts
            .iter()
            .map(|&c| S::from_usize(c).expect("degree fits the scalar"))
            .collect();
        Ok(Self {
            n,
            pairs: set.pairs().to_vec(),
            row_ptr,
            col_idx,
            degree,
            warm: vec![Array1::zeros(n); NODE_SOLVE_SLOTS],
        })
    }

    /// Applies `cI + d(D_a + A_a)` to a node vector.
    fn apply_node_system(&self, c: S, d: S, v: &Array1<S>, out: &mut Array1<S>) {
        for u in 0..self.n {
            let mut acc = (c + d * self.degree[u]) * v[u];
            for &w in &self.col_idx[self.row_ptr[u]..self.row_ptr[u + 1]] {
                acc += d * v[w];
            }
            out[u] = acc;
        }
    }
}

impl<S: Scalar> PairSpace<S> for CandidateSpace<S> {
    fn dim(&self) -> usize {
        self.pairs.len()
    }

    fn node_count(&self) -> usize {
        self.n
    }

    fn accumulate(&self, v: ndarray::ArrayView1<'_, S>) -> Array1<S> {
        debug_assert_eq!(v.len(), self.pairs.len());
        let mut out = Array1::zeros(self.n);
        for (e, &(i, j)) in self.pairs.iter().enumerate() {
            let x = v[e];
            out[i] += x;
            out[j] += x;
        }
        out
    }

    fn spread(&self, u: ndarray::ArrayView1<'_, S>) -> Array1<S> {
        debug_assert_eq!(u.len(), self.n);
        let mut out = Array1::zeros(self.pairs.len());
        for (e, &(i, j)) in self.pairs.iter().enumerate() {
            out[e] = u[i] + u[j];
        }
        out
    }

    fn node_solve(
        &mut self,
        c: S,
        d: S,
        rhs: ndarray::ArrayView1<'_, S>,
        slot: usize,
    ) -> Result<Array1<S>> {
        let n = self.n;
        let rhs_norm = rhs.iter().map(|&x| x * x).sum::<S>().sqrt();
        if rhs_norm == S::zero() {
            // The system is positive definite, so the solution is exactly 0.
            self.warm[slot].fill(S::zero());
            return Ok(Array1::zeros(n));
        }
        let tol = S::from_f64_lossy(CG_RTOL)
            .max(S::from_f64_lossy(4.0) * S::epsilon())
            * rhs_norm;
        let max_iters = CG_MAX_ITER_FACTOR * n;

        let mut x = self.warm[slot].clone();
        let mut ax = Array1::zeros(n);
        self.apply_node_system(c, d, &x, &mut ax);
        let mut r = rhs.to_owned();
        r.zip_mut_with(&ax, |ri, &a| *ri -= a);

        let norm = |v: &Array1<S>| v.iter().map(|&e| e * e).sum::<S>().sqrt();
        let mut r_norm = norm(&r);
        if r_norm <= tol {
            self.warm[slot].assign(&x);
            return Ok(x);
        }

        // Jacobi preconditioner: the diagonal of the system matrix.
        let precond: Array1<S> =
            Array1::from_iter((0..n).map(|u| S::one() / (c + d * self.degree[u])));
        let mut z: Array1<S> = &r * &precond;
        let mut p = z.clone();
        let mut rz = r.iter().zip(z.iter()).map(|(&a, &b)| a * b).sum::<S>();
        let mut ap = Array1::zeros(n);

        for _ in 0..max_iters {
            self.apply_node_system(c, d, &p, &mut ap);
            let pap = p.iter().zip(ap.iter()).map(|(&a, &b)| a * b).sum::<S>();
            if !(pap > S::zero()) {
                // Loss of positive definiteness can only come from rounding;
                // treat it as a stall rather than continuing with garbage.
                return Err(Error::CgStalled {
                    residual: (r_norm / rhs_norm).to_f64_lossy(),
                    tol: (tol / rhs_norm).to_f64_lossy(),
                    iterations: max_iters,
                });
            }
            let step = rz / pap;
            x.zip_mut_with(&p, |xi, &pi| *xi += step * pi);
            r.zip_mut_with(&ap, |ri, &ai| *ri -= step * ai);
            r_norm = norm(&r);
            if r_norm <= tol {
                self.warm[slot].assign(&x);
                return Ok(x);
            }
            z = &r * &precond;
            let rz_next = r.iter().zip(z.iter()).map(|(&a, &b)| a * b).sum::<S>();
            let beta = rz_next / rz;
            rz = rz_next;
            p.zip_mut_with(&z, |pi, &zi| *pi = zi + beta * *pi);
        }
        Err(Error::CgStalled {
            residual: (r_norm / rhs_norm).to_f64_lossy(),
            tol: (tol / rhs_norm).to_f64_lossy(),
            iterations: max_iters,
        })
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Pairwise smoothness costs restricted to the candidate pairs:
/// `k̃_e = −‖X_i· − X_j·‖²` for each candidate `(i, j)`.
///
/// Runs in `O(|E_a|·m)` without forming the `n×n` Gram matrix.
pub fn candidate_costs<S: Scalar>(
    x: &Array2<S>,
    candidates: &CandidateEdgeSet,
) -> Result<Array1<S>> {
    if x.nrows() != candidates.node_count() {
        return Err(Error::DimensionMismatch {
            context: "signal row count",
            expected: candidates.node_count(),
            got: x.nrows(),
        });
    }
    if x.ncols() == 0 {
        return Err(Error::EmptySignals);
    }
    let mut k = Array1::zeros(candidates.len());
    for (e, &(i, j)) in candidates.pairs().iter().enumerate() {
        let ri = x.row(i);
        let rj = x.row(j);
        let mut dist = S::zero();
        for (&a, &b) in ri.iter().zip(rj.iter()) {
            let diff = a - b;
            dist += diff * diff;
        }
        k[e] = -dist;
    }
    Ok(k)
}

/// Solves `M̃ x = v` over the candidate pairs, where
/// `M̃ = c·I + d·Q̃ᵀQ̃` and `Q̃` is the node-pair incidence operator
/// restricted to the candidate set — the reduced analog of
/// [`crate::solver::solve_m`].
///
/// `v` is ordered like [`CandidateEdgeSet::pairs`]. `c` must be positive and
/// `d` nonnegative. The inner node system is solved by preconditioned
/// conjugate gradients; see [`CG_RTOL`] for the accuracy contract.
pub fn solve_m_on<S: Scalar>(
    candidates: &CandidateEdgeSet,
    v: &Array1<S>,
    c: S,
    d: S,
) -> Result<Array1<S>> {
    if v.len() != candidates.len() {
        return Err(Error::DimensionMismatch {
            context: "reduced vector length",
            expected: candidates.len(),
            got: v.len(),
        });
    }
    let mut space = CandidateSpace::new(candidates)?;
    apply_minv(&mut space, c, d, v.view(), SLOT_SETUP)
}

/// Result of a reduced solve, bundling the recovered pair with the candidate
/// set that produced it.
#[derive(Debug, Clone)]
pub struct FastOutcome<S> {
    /// Full-pair-space result; non-candidate entries are exactly zero.
    pub result: SolveResult<S>,
    /// The candidate set the solve ran on.
    pub candidates: CandidateEdgeSet,
}

/// Recovers a signed graph over a restricted candidate set built from the
/// signals themselves (each node's `k` nearest and `k` farthest peers).
pub fn solve_fast<S: Scalar>(
    x: &Array2<S>,
    k_neighbors: usize,
    cfg: &AdmmConfig,
) -> Result<FastOutcome<S>> {
    let provider = BruteForceNeighbors::new(x)?;
    let candidates = build_candidates(&provider, k_neighbors)?;
    let (result, _) = solve_fast_on(x, &candidates, cfg, StopRule::Tolerance, None)?;
    Ok(FastOutcome {
        result,
        candidates,
    })
}

/// Reduced solve on an explicit candidate set.
///
/// The returned [`SolveResult`] lives in full pair space (non-candidate
/// entries exactly zero); the returned [`AdmmState`] is in candidate
/// coordinates, ordered like [`CandidateEdgeSet::pairs`].
pub fn solve_fast_on<S: Scalar>(
    x: &Array2<S>,
    candidates: &CandidateEdgeSet,
    cfg: &AdmmConfig,
    stop: StopRule,
    on_iter: Option<&mut dyn FnMut(IterationDiag<S>)>,
) -> Result<(SolveResult<S>, AdmmState<S>)> {
    let costs = candidate_costs(x, candidates)?;
    solve_fast_from_costs(candidates, &costs, cfg, stop, on_iter)
}

/// Reduced solve from precomputed candidate costs (see [`candidate_costs`]).
///
/// Separating cost computation from the iteration keeps scaling
/// measurements honest and lets parameter sweeps share the cost vector.
pub fn solve_fast_from_costs<S: Scalar>(
    candidates: &CandidateEdgeSet,
    costs: &Array1<S>,
    cfg: &AdmmConfig,
    stop: StopRule,
    on_iter: Option<&mut dyn FnMut(IterationDiag<S>)>,
) -> Result<(SolveResult<S>, AdmmState<S>)> {
    let mut space = CandidateSpace::new(candidates)?;
    let outcome = drive(&mut space, costs, cfg, stop, on_iter)?;
    let state = outcome.state;
    let final_objective = *state
        .objective_history
        .last()
        .expect("driver always performs at least one iteration");
    let residuals = *state
        .residual_history
        .last()
        .expect("driver always performs at least one iteration");
    let zpos_full = candidates.expand(&state.zpos)?;
    let zneg_full = candidates.expand(&state.zneg)?;
    let result = assemble_result(
        candidates.node_count(),
        zpos_full.into_array(),
        zneg_full.into_array(),
        outcome.tolerance_met,
        state.iterations,
        final_objective,
        residuals,
    );
    Ok((result, state))
}
