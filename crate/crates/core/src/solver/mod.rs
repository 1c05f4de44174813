//! Alternating-direction solver for the signed-topology recovery problem.
//!
//! Given `m` signal columns stacked as rows of `X ∈ ℝ^{n×m}`, the solver
//! recovers the upper-triangular vectors `ℓ⁺, ℓ⁻ ≤ 0` of the two Laplacian
//! halves by minimising
//!
//! ```text
//!   kᵀℓ⁺ − kᵀℓ⁻ + α₁‖ℓ⁺‖²_P + α₂‖ℓ⁻‖²_P
//!   subject to   1ᵀℓ⁺ = 1ᵀℓ⁻ = −n,   ℓ± ≤ 0,   (ℓ⁺)ᵀℓ⁻ = 0,
//! ```
//!
//! where `‖v‖²_P = vᵀ(QᵀQ + 2I)v` is the Frobenius norm of the Laplacian
//! assembled from `v`, and `k` encodes the pairwise smoothness costs of the
//! observations ([`compute_k`]).
//!
//! The constraint set splits into two scaled simplex-like sets coupled only
//! through the complementarity condition, which the splitting handles in a
//! closed-form joint projection ([`z_update`]). The quadratic step solves a
//! regularised normal system with matrix `M = (4α+ρ)I + 2αQᵀQ` through a
//! low-rank factorisation ([`solve_m`]) so no `d×d` matrix is ever formed.
//!
//! All state lives in half-vectorised pair space ([`EdgeVector`]); dense
//! matrices appear only in user-facing conversions.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::halfvec::{
    accumulate_pairs, edge_count, pair_iter, spread_nodes, EdgeVector, LaplacianPairVec,
};
use crate::scalar::Scalar;

pub mod fast;

/// Relative slack (as a fraction of `n`) allowed between `1ᵀz±` and the
/// target trace `−n` before the final rescaling of a solution is refused.
pub const TRACE_GAP_RTOL: f64 = 1e-3;

// ---------------------------------------------------------------------------
// Configuration and results
// ---------------------------------------------------------------------------

/// Parameters of the splitting iteration.
///
/// `alpha1` and `alpha2` weight the Frobenius regularisers of the positive
/// and negative part; larger values spread the trace budget over more pairs.
/// `rho` is the augmented-Lagrangian penalty: any positive value converges
/// eventually, larger values enforce feasibility of the iterates earlier.
#[derive(Debug, Clone)]
pub struct AdmmConfig {
    /// Regularisation weight on the positive part (`≥ 0`).
    pub alpha1: f64,
    /// Regularisation weight on the negative part (`≥ 0`).
    pub alpha2: f64,
    /// Augmented-Lagrangian penalty (`> 0`).
    pub rho: f64,
    /// Iteration cap for [`StopRule::Tolerance`].
    pub max_iter: usize,
    /// Threshold on the change of the objective between iterations.
    pub eps: f64,
    /// Threshold on the primal residuals `‖z± − ℓ±‖₂`.
    pub residual_tol: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            alpha1: 0.1,
            alpha2: 0.1,
            rho: 1.0,
            max_iter: 10_000,
            eps: 1e-6,
            residual_tol: 1e-6,
        }
    }
}

impl AdmmConfig {
    /// Checks every field for finiteness and sign.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::invalid_parameter(name, "must be finite and ≥ 0"));
            }
        }
        if !self.rho.is_finite() || self.rho <= 0.0 {
            return Err(Error::invalid_parameter("rho", "must be finite and > 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid_parameter("max_iter", "must be ≥ 1"));
        }
        for (name, value) in [("eps", self.eps), ("residual_tol", self.residual_tol)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::invalid_parameter(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }
}

/// Loop-termination policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Run until the objective has settled (`|Δobj| ≤ eps`) **and** both
    /// primal residuals are below `residual_tol`, or `max_iter` is reached.
    Tolerance,
    /// Run exactly this many iterations regardless of progress
    /// (used by scaling benchmarks; convergence flags still reflect the
    /// tolerance test at the final iterate).
    FixedIterations(usize),
}

/// Per-iteration diagnostics passed to an observer callback.
#[derive(Debug, Clone, Copy)]
pub struct IterationDiag<S> {
    /// 1-based iteration counter.
    pub iteration: usize,
    /// Objective value at the current `(ℓ⁺, ℓ⁻)` iterate.
    pub objective: S,
    /// `‖z⁺ − ℓ⁺‖₂`.
    pub residual_pos: S,
    /// `‖z⁻ − ℓ⁻‖₂`.
    pub residual_neg: S,
}

/// Full iterate history of one solve, exposed for inspection and tests.
#[derive(Debug, Clone)]
pub struct AdmmState<S> {
    /// Quadratic-step iterate for the positive part.
    pub lpos: Array1<S>,
    /// Quadratic-step iterate for the negative part.
    pub lneg: Array1<S>,
    /// Projection-step iterate for the positive part (always feasible in
    /// sign and complementarity).
    pub zpos: Array1<S>,
    /// Projection-step iterate for the negative part.
    pub zneg: Array1<S>,
    /// Scaled dual for the positive split constraint.
    pub ypos: Array1<S>,
    /// Scaled dual for the negative split constraint.
    pub yneg: Array1<S>,
    /// Number of iterations actually performed.
    pub iterations: usize,
    /// Objective value after each iteration.
    pub objective_history: Vec<S>,
    /// Primal residual pair `(‖z⁺−ℓ⁺‖₂, ‖z⁻−ℓ⁻‖₂)` after each iteration.
    pub residual_history: Vec<(S, S)>,
}

/// Outcome of a solve: the recovered pair and convergence diagnostics.
#[derive(Debug, Clone)]
pub struct SolveResult<S> {
    /// Recovered `(ℓ⁺, ℓ⁻)`, rescaled to the exact trace when the raw
    /// iterates land within [`TRACE_GAP_RTOL`] of it.
    pub pair: LaplacianPairVec<S>,
    /// Whether the tolerance test was met *and* the trace rescaling applied.
    pub converged: bool,
    /// Iterations performed.
    pub iterations: usize,
    /// Objective at the final iterate.
    pub final_objective: S,
    /// Final primal residuals `(positive, negative)`.
    pub residuals: (S, S),
}

// ---------------------------------------------------------------------------
// Pair-space abstraction
// ---------------------------------------------------------------------------

/// A (sub)space of node pairs on which the splitting iteration runs.
///
/// The full solver uses every pair; the candidate-set solver restricts to a
/// sparse subset. Both expose the pair-to-node accumulation operator and a
/// solver for the node-coupling system that [`apply_minv`] reduces to.
pub(crate) trait PairSpace<S: Scalar> {
    /// Number of pair coordinates.
    fn dim(&self) -> usize;
    /// Number of nodes.
    fn node_count(&self) -> usize;
    /// `Qv`: per-node sums of incident pair entries.
    fn accumulate(&self, v: ArrayView1<'_, S>) -> Array1<S>;
    /// `Qᵀu`: endpoint sums per pair.
    fn spread(&self, u: ArrayView1<'_, S>) -> Array1<S>;
    /// Solves `(cI + d·QQᵀ)x = rhs` on node space. `slot` identifies the
    /// call site so iterative implementations can warm-start per use.
    fn node_solve(&mut self, c: S, d: S, rhs: ArrayView1<'_, S>, slot: usize) -> Result<Array1<S>>;
}

/// Number of warm-start slots a [`PairSpace`] must provide: one per sign
/// branch of the quadratic step plus one for setup solves.
pub(crate) const NODE_SOLVE_SLOTS: usize = 3;
pub(crate) const SLOT_POS: usize = 0;
pub(crate) const SLOT_NEG: usize = 1;
pub(crate) const SLOT_SETUP: usize = 2;

/// Applies `M⁻¹ = ((c)I + d·QᵀQ)⁻¹` to `v` without forming `M`.
///
/// Uses the push-through identity
/// `M⁻¹v = (v − d·Qᵀ(cI + d·QQᵀ)⁻¹Qv)/c`, which trades the `d×d` system for
/// an `n×n` one on node space.
pub(crate) fn apply_minv<S: Scalar, P: PairSpace<S>>(
    space: &mut P,
    c: S,
    d: S,
    v: ArrayView1<'_, S>,
    slot: usize,
) -> Result<Array1<S>> {
    if !(c > S::zero()) || !c.is_finite() {
        return Err(Error::invalid_parameter("c", "must be finite and > 0"));
    }
    if !(d >= S::zero()) || !d.is_finite() {
        return Err(Error::invalid_parameter("d", "must be finite and ≥ 0"));
    }
    if v.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            context: "pair vector length",
            expected: space.dim(),
            got: v.len(),
        });
    }
    if d == S::zero() {
        return Ok(v.mapv(|x| x / c));
    }
    let qv = space.accumulate(v);
    let node = space.node_solve(c, d, qv.view(), slot)?;
    let corr = space.spread(node.view());
    let mut out = v.to_owned();
    out.zip_mut_with(&corr, |o, &r| *o = (*o - d * r) / c);
    Ok(out)
}

/// The complete pair space on `n` nodes, with a closed-form node solve.
///
/// Here `QQᵀ = (n−2)I + 11ᵀ`, so `(cI + d·QQᵀ)⁻¹` is a rank-one update of a
/// scalar matrix and inverts in `O(n)`.
pub(crate) struct FullPairSpace {
    n: usize,
}

impl FullPairSpace {
    pub(crate) fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Infeasible { n });
        }
        Ok(Self { n })
    }
}

impl<S: Scalar> PairSpace<S> for FullPairSpace {
    fn dim(&self) -> usize {
        edge_count(self.n)
    }

    fn node_count(&self) -> usize {
        self.n
    }

    fn accumulate(&self, v: ArrayView1<'_, S>) -> Array1<S> {
        accumulate_pairs(v, self.n)
    }

    fn spread(&self, u: ArrayView1<'_, S>) -> Array1<S> {
        spread_nodes(u, self.n)
    }

    fn node_solve(
        &mut self,
        c: S,
        d: S,
        rhs: ArrayView1<'_, S>,
        _slot: usize,
    ) -> Result<Array1<S>> {
        // (aI + d·11ᵀ)⁻¹u = (u − (d·1ᵀu / (a + dn))·1)/a  with  a = c + d(n−2).
        let n_s = S::from_usize(self.n).expect("node count fits the scalar");
        let two = S::from_f64_lossy(2.0);
        let a = c + d * (n_s - two);
        let denom = a + d * n_s;
        if !(a > S::zero()) || !(denom > S::zero()) {
            return Err(Error::invalid_parameter(
                "c",
                "node system is not positive definite",
            ));
        }
        let shift = d * rhs.sum() / denom;
        Ok(rhs.mapv(|u| (u - shift) / a))
    }
}

// ---------------------------------------------------------------------------
// Spec-level building blocks
// ---------------------------------------------------------------------------

/// Pairwise smoothness costs of the observations.
///
/// For `X ∈ ℝ^{n×m}` (one row per node) and `S = XXᵀ`, the cost of pair
/// `(i,j)` is `k_(i,j) = 2S_ij − S_ii − S_jj = −‖X_i· − X_j·‖²`, assembled as
/// `k = 2·upper(S) − Qᵀdiag(S)` so that `tr(L·S) = kᵀℓ` for any Laplacian
/// built from a pair vector `ℓ` via endpoint cancellation.
///
/// Requires `n ≥ 3` nodes and `m ≥ 1` columns.
pub fn compute_k<S: Scalar>(x: &Array2<S>) -> Result<EdgeVector<S>> {
    let n = x.nrows();
    if n < 3 {
        return Err(Error::Infeasible { n });
    }
    if x.ncols() == 0 {
        return Err(Error::EmptySignals);
    }
    // Work per pair instead of forming the n×n Gram matrix:
    // k_(i,j) = −‖X_i· − X_j·‖².
    let mut k = EdgeVector::zeros(n);
    for (e, (i, j)) in pair_iter(n).enumerate() {
        let ri = x.row(i);
        let rj = x.row(j);
        let mut dist = S::zero();
        for (&a, &b) in ri.iter().zip(rj.iter()) {
            let diff = a - b;
            dist += diff * diff;
        }
        k.array_mut()[e] = -dist;
    }
    Ok(k)
}

fn check_same_space<S: Scalar>(
    a: &EdgeVector<S>,
    b: &EdgeVector<S>,
    context: &'static str,
) -> Result<()> {
    if a.node_count() != b.node_count() {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.node_count(),
            got: b.node_count(),
        });
    }
    Ok(())
}

/// Raw-array z-update kernel shared by the full and candidate solvers.
fn z_update_raw<S: Scalar>(
    lpos: &Array1<S>,
    lneg: &Array1<S>,
    ypos: &Array1<S>,
    yneg: &Array1<S>,
    rho: S,
    zpos: &mut Array1<S>,
    zneg: &mut Array1<S>,
) {
    let zero = S::zero();
    for e in 0..lpos.len() {
        let v = lpos[e] - ypos[e] / rho;
        let w = lneg[e] - yneg[e] / rho;
        // Joint projection onto {z⁺ ≤ 0, z⁻ ≤ 0, z⁺z⁻ = 0}: keep at most the
        // more negative of the two targets, ties to the negative part.
        if v < w && v < zero {
            zpos[e] = v;
            zneg[e] = zero;
        } else if w <= v && w < zero {
            zpos[e] = zero;
            zneg[e] = w;
        } else {
            zpos[e] = zero;
            zneg[e] = zero;
        }
    }
}

/// Projection step: jointly projects both relaxed targets onto the
/// sign-and-complementarity set.
///
/// For each pair, with `v = ℓ⁺ − y⁺/ρ` and `w = ℓ⁻ − y⁻/ρ`, at most one
/// output entry is nonzero: the strictly negative minimum of `(v, w)`
/// (ties go to the negative part). The result therefore satisfies
/// `z± ≤ 0` and `(z⁺)ᵀz⁻ = 0` exactly.
pub fn z_update<S: Scalar>(
    lpos: &EdgeVector<S>,
    lneg: &EdgeVector<S>,
    ypos: &EdgeVector<S>,
    yneg: &EdgeVector<S>,
    rho: S,
) -> Result<(EdgeVector<S>, EdgeVector<S>)> {
    check_same_space(lpos, lneg, "negative-part node count")?;
    check_same_space(lpos, ypos, "positive dual node count")?;
    check_same_space(lpos, yneg, "negative dual node count")?;
    if !(rho > S::zero()) || !rho.is_finite() {
        return Err(Error::invalid_parameter("rho", "must be finite and > 0"));
    }
    let n = lpos.node_count();
    let mut zpos = EdgeVector::zeros(n);
    let mut zneg = EdgeVector::zeros(n);
    z_update_raw(
        lpos.array(),
        lneg.array(),
        ypos.array(),
        yneg.array(),
        rho,
        zpos.array_mut(),
        zneg.array_mut(),
    );
    Ok((zpos, zneg))
}

/// Applies `(cI + d·QᵀQ)⁻¹` to a pair vector on the full pair space.
///
/// `c` must be positive; `d` must be nonnegative (`d = 0` reduces to
/// division by `c`). Runs in `O(n²)` time and `O(n²)` memory via the
/// node-space push-through; no pair-by-pair matrix is formed.
pub fn solve_m<S: Scalar>(v: &EdgeVector<S>, c: S, d: S) -> Result<EdgeVector<S>> {
    let n = v.node_count();
    let mut space = FullPairSpace::new(n)?;
    let data = apply_minv(&mut space, c, d, v.array().view(), SLOT_SETUP)?;
    EdgeVector::from_array(n, data)
}

/// One sign branch of the quadratic step, with its cached solve artifacts.
struct BranchCache<S> {
    /// `±k`: the smoothness costs with the sign this branch sees.
    k_signed: Array1<S>,
    /// Diagonal coefficient `c = 4α + ρ` of `M`.
    c: S,
    /// Coupling coefficient `d = 2α` of `M`.
    d: S,
    /// `M⁻¹1`, reused by every trace correction.
    minv_one: Array1<S>,
    /// `1ᵀM⁻¹1`.
    gram: S,
    /// Warm-start slot for the node solves of this branch.
    slot: usize,
}

impl<S: Scalar> BranchCache<S> {
    fn build<P: PairSpace<S>>(
        space: &mut P,
        alpha: S,
        rho: S,
        k_signed: Array1<S>,
        slot: usize,
    ) -> Result<Self> {
        let four = S::from_f64_lossy(4.0);
        let two = S::from_f64_lossy(2.0);
        let c = four * alpha + rho;
        let d = two * alpha;
        let ones = Array1::ones(space.dim());
        let minv_one = apply_minv(space, c, d, ones.view(), SLOT_SETUP)?;
        let gram = minv_one.sum();
        if !(gram > S::zero()) {
            return Err(Error::invalid_parameter(
                "alpha",
                "trace correction is singular for these parameters",
            ));
        }
        Ok(Self {
            k_signed,
            c,
            d,
            minv_one,
            gram,
            slot,
        })
    }

    /// Solves the trace-constrained quadratic step:
    /// `argmin ±kᵀℓ + α‖ℓ‖²_P + (ρ/2)‖ℓ − z − y/ρ‖²  s.t. 1ᵀℓ = −n`.
    fn l_step<P: PairSpace<S>>(
        &self,
        space: &mut P,
        z: &Array1<S>,
        y: &Array1<S>,
        rho: S,
    ) -> Result<Array1<S>> {
        let n_s = S::from_usize(space.node_count()).expect("node count fits the scalar");
        // Unconstrained minimiser ℓ₀ = M⁻¹(ρz + y − k±).
        let mut rhs = Array1::zeros(z.len());
        for e in 0..z.len() {
            rhs[e] = rho * z[e] + y[e] - self.k_signed[e];
        }
        let l0 = apply_minv(space, self.c, self.d, rhs.view(), self.slot)?;
        // Exact projection onto {1ᵀℓ = −n} in the M-metric:
        // ℓ = ℓ₀ − ((1ᵀℓ₀ + n)/(1ᵀM⁻¹1))·M⁻¹1.
        let gap = (l0.sum() + n_s) / self.gram;
        let mut l = l0;
        l.zip_mut_with(&self.minv_one, |li, &mi| *li -= gap * mi);
        Ok(l)
    }
}

/// Quadratic step on the full pair space:
/// `argmin kᵀℓ + α‖ℓ‖²_P + (ρ/2)‖ℓ − z − y/ρ‖²  s.t. 1ᵀℓ = −n`.
///
/// `k_signed` carries the sign of the cost term the caller wants (`+k` for
/// the positive part, `−k` for the negative part). This convenience entry
/// recomputes the cached `M⁻¹1` on every call; the iteration loop in
/// [`solve`] reuses it across iterations instead.
pub fn l_update<S: Scalar>(
    z: &EdgeVector<S>,
    y: &EdgeVector<S>,
    k_signed: &EdgeVector<S>,
    alpha: S,
    rho: S,
) -> Result<EdgeVector<S>> {
    check_same_space(z, y, "dual node count")?;
    check_same_space(z, k_signed, "cost node count")?;
    if !(alpha >= S::zero()) || !alpha.is_finite() {
        return Err(Error::invalid_parameter("alpha", "must be finite and ≥ 0"));
    }
    if !(rho > S::zero()) || !rho.is_finite() {
        return Err(Error::invalid_parameter("rho", "must be finite and > 0"));
    }
    let n = z.node_count();
    let mut space = FullPairSpace::new(n)?;
    let branch = BranchCache::build(&mut space, alpha, rho, k_signed.array().clone(), SLOT_SETUP)?;
    let data = branch.l_step(&mut space, z.array(), y.array(), rho)?;
    EdgeVector::from_array(n, data)
}

/// Raw objective kernel over an arbitrary pair space.
fn objective_raw<S: Scalar, P: PairSpace<S>>(
    space: &P,
    lpos: &Array1<S>,
    lneg: &Array1<S>,
    k: &Array1<S>,
    alpha1: S,
    alpha2: S,
) -> S {
    let two = S::from_f64_lossy(2.0);
    let mut value = S::zero();
    for e in 0..k.len() {
        value += k[e] * (lpos[e] - lneg[e]);
    }
    for (alpha, l) in [(alpha1, lpos), (alpha2, lneg)] {
        if alpha == S::zero() {
            continue;
        }
        let q = space.accumulate(l.view());
        let quad = q.iter().map(|&x| x * x).sum::<S>()
            + two * l.iter().map(|&x| x * x).sum::<S>();
        value += alpha * quad;
    }
    value
}

/// Evaluates the recovery objective
/// `kᵀ(ℓ⁺ − ℓ⁻) + α₁‖ℓ⁺‖²_P + α₂‖ℓ⁻‖²_P`,
/// where `‖v‖²_P = ‖Qv‖² + 2‖v‖²` equals the squared Frobenius norm of the
/// Laplacian assembled from `v`.
pub fn objective<S: Scalar>(
    lpos: &EdgeVector<S>,
    lneg: &EdgeVector<S>,
    k: &EdgeVector<S>,
    alpha1: S,
    alpha2: S,
) -> Result<S> {
    check_same_space(lpos, lneg, "negative-part node count")?;
    check_same_space(lpos, k, "cost node count")?;
    let space = FullPairSpace::new(lpos.node_count())?;
    Ok(objective_raw(
        &space,
        lpos.array(),
        lneg.array(),
        k.array(),
        alpha1,
        alpha2,
    ))
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

/// Everything the driver hands back before final assembly.
pub(crate) struct DriveOutcome<S> {
    pub state: AdmmState<S>,
    pub tolerance_met: bool,
}

/// Runs the splitting iteration on an arbitrary pair space.
pub(crate) fn drive<S: Scalar, P: PairSpace<S>>(
    space: &mut P,
    k: &Array1<S>,
    cfg: &AdmmConfig,
    stop: StopRule,
    mut on_iter: Option<&mut dyn FnMut(IterationDiag<S>)>,
) -> Result<DriveOutcome<S>> {
    cfg.validate()?;
    let dim = space.dim();
    if k.len() != dim {
        return Err(Error::DimensionMismatch {
            context: "cost vector length",
            expected: dim,
            got: k.len(),
        });
    }
    let iter_cap = match stop {
        StopRule::Tolerance => cfg.max_iter,
        StopRule::FixedIterations(count) => {
            if count == 0 {
                return Err(Error::invalid_parameter(
                    "iterations",
                    "fixed iteration count must be ≥ 1",
                ));
            }
            count
        }
    };

    let alpha1 = S::from_f64_lossy(cfg.alpha1);
    let alpha2 = S::from_f64_lossy(cfg.alpha2);
    let rho = S::from_f64_lossy(cfg.rho);
    let eps = S::from_f64_lossy(cfg.eps);
    let residual_tol = S::from_f64_lossy(cfg.residual_tol);

    let branch_pos = BranchCache::build(space, alpha1, rho, k.clone(), SLOT_POS)?;
    let branch_neg = BranchCache::build(space, alpha2, rho, k.mapv(|x| -x), SLOT_NEG)?;

    let mut state = AdmmState {
        lpos: Array1::zeros(dim),
        lneg: Array1::zeros(dim),
        zpos: Array1::zeros(dim),
        zneg: Array1::zeros(dim),
        ypos: Array1::zeros(dim),
        yneg: Array1::zeros(dim),
        iterations: 0,
        objective_history: Vec::new(),
        residual_history: Vec::new(),
    };

    let mut prev_objective: Option<S> = None;
    let mut tolerance_met = false;

    for iteration in 1..=iter_cap {
        z_update_raw(
            &state.lpos,
            &state.lneg,
            &state.ypos,
            &state.yneg,
            rho,
            &mut state.zpos,
            &mut state.zneg,
        );

        state.lpos = branch_pos.l_step(space, &state.zpos, &state.ypos, rho)?;
        state.lneg = branch_neg.l_step(space, &state.zneg, &state.yneg, rho)?;

        for e in 0..dim {
            state.ypos[e] += rho * (state.zpos[e] - state.lpos[e]);
            state.yneg[e] += rho * (state.zneg[e] - state.lneg[e]);
        }

        let objective = objective_raw(space, &state.lpos, &state.lneg, k, alpha1, alpha2);
        let mut res_pos = S::zero();
        let mut res_neg = S::zero();
        for e in 0..dim {
            let dp = state.zpos[e] - state.lpos[e];
            let dn = state.zneg[e] - state.lneg[e];
            res_pos += dp * dp;
            res_neg += dn * dn;
        }
        let res_pos = res_pos.sqrt();
        let res_neg = res_neg.sqrt();
        if !objective.is_finite() || !res_pos.is_finite() || !res_neg.is_finite() {
            return Err(Error::Diverged { iteration });
        }

        state.iterations = iteration;
        state.objective_history.push(objective);
        state.residual_history.push((res_pos, res_neg));
        if let Some(cb) = on_iter.as_mut() {
            cb(IterationDiag {
                iteration,
                objective,
                residual_pos: res_pos,
                residual_neg: res_neg,
            });
        }

        let settled = prev_objective
            .map(|prev| (objective - prev).abs() <= eps)
            .unwrap_or(false);
        let feasible = res_pos <= residual_tol && res_neg <= residual_tol;
        if settled && feasible {
            tolerance_met = true;
            if matches!(stop, StopRule::Tolerance) {
                break;
            }
        } else {
            tolerance_met = false;
        }
        prev_objective = Some(objective);
    }

    Ok(DriveOutcome {
        state,
        tolerance_met,
    })
}

/// Final assembly: rescale each part of `z±` to the exact trace budget when
/// its raw sum is close enough, otherwise return the raw iterate and clear
/// the convergence flag.
pub(crate) fn assemble_result<S: Scalar>(
    n: usize,
    mut zpos: Array1<S>,
    mut zneg: Array1<S>,
    outcome_tolerance_met: bool,
    iterations: usize,
    final_objective: S,
    residuals: (S, S),
) -> SolveResult<S> {
    let n_s = S::from_usize(n).expect("node count fits the scalar");
    let gap_tol = S::from_f64_lossy(TRACE_GAP_RTOL) * n_s;
    let target = -n_s;
    let mut rescaled = true;
    for z in [&mut zpos, &mut zneg] {
        let sum = z.sum();
        if (sum - target).abs() <= gap_tol {
            // sum is within 0.1% of −n, hence strictly negative: safe ratio.
            let scale = target / sum;
            z.mapv_inplace(|x| x * scale);
        } else {
            rescaled = false;
        }
    }
    let pair = LaplacianPairVec::new(
        EdgeVector::from_array(n, zpos).expect("projection iterate has pair-space length"),
        EdgeVector::from_array(n, zneg).expect("projection iterate has pair-space length"),
    )
    .expect("projection iterates share the pair space");
    SolveResult {
        pair,
        converged: outcome_tolerance_met && rescaled,
        iterations,
        final_objective,
        residuals,
    }
}

/// Recovers a signed-graph Laplacian pair from observed signals.
///
/// `x` holds one row per node and one column per observation. Convergence
/// follows [`StopRule::Tolerance`]; see [`solve_with`] for custom stopping
/// and iterate inspection, and [`solve_from_costs`] to reuse a precomputed
/// cost vector across many configurations.
pub fn solve<S: Scalar>(x: &Array2<S>, cfg: &AdmmConfig) -> Result<SolveResult<S>> {
    let k = compute_k(x)?;
    let (result, _) = solve_from_costs(&k, cfg, StopRule::Tolerance, None)?;
    Ok(result)
}

/// [`solve`] with explicit stop rule and an optional per-iteration observer;
/// also returns the full iterate history.
pub fn solve_with<S: Scalar>(
    x: &Array2<S>,
    cfg: &AdmmConfig,
    stop: StopRule,
    on_iter: Option<&mut dyn FnMut(IterationDiag<S>)>,
) -> Result<(SolveResult<S>, AdmmState<S>)> {
    let k = compute_k(x)?;
    solve_from_costs(&k, cfg, stop, on_iter)
}

/// Runs the solver directly from pairwise smoothness costs.
///
/// Useful when sweeping regularisation weights over a fixed dataset: the
/// cost vector depends only on the data and can be shared across the sweep.
pub fn solve_from_costs<S: Scalar>(
    k: &EdgeVector<S>,
    cfg: &AdmmConfig,
    stop: StopRule,
    on_iter: Option<&mut dyn FnMut(IterationDiag<S>)>,
) -> Result<(SolveResult<S>, AdmmState<S>)> {
    let n = k.node_count();
    let mut space = FullPairSpace::new(n)?;
    let outcome = drive(&mut space, k.array(), cfg, stop, on_iter)?;
    let state = outcome.state;
    let final_objective = *state
        .objective_history
        .last()
        .expect("driver always performs at least one iteration");
    let residuals = *state
        .residual_history
        .last()
        .expect("driver always performs at least one iteration");
    let result = assemble_result(
        n,
        state.zpos.clone(),
        state.zneg.clone(),
        outcome.tolerance_met,
        state.iterations,
        final_objective,
        residuals,
    );
    Ok((result, state))
}
