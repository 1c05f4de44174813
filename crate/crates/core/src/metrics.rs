//! Evaluation of recovered signed graphs against ground truth.
//!
//! The solver emits continuous pair vectors; evaluation proceeds in three
//! views:
//! - **classification** ([`classify_edges`], [`macro_f1`]): threshold the
//!   recovered weights into `{−1, 0, +1}` labels and score each sign's
//!   support with binary F1, averaged over the two signs;
//! - **ranking** ([`auprc_ratio`]): rank all pairs by recovered strength and
//!   measure the area under the precision-recall curve per sign, normalized
//!   by the random baseline (the sign's density), so values are comparable
//!   across graphs of different sparsity;
//! - **estimation** ([`frob_error`]): Frobenius distance between recovered
//!   and true Laplacian halves under a common trace normalization.
//!
//! [`grid_search`] sweeps regularization weights over a fixed dataset,
//! scoring every cell with all of the above and selecting the best by a
//! configurable metric.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{Sign, SignedGraph};
use crate::halfvec::{edge_count, laplacians_from_vec, pair_iter, LaplacianPairVec};
use crate::scalar::Scalar;
use crate::solver::fast::{
    build_candidates, candidate_costs, solve_fast_from_costs, BruteForceNeighbors,
};
use crate::solver::{compute_k, solve_from_costs, AdmmConfig, StopRule};

// ---------------------------------------------------------------------------
// Sign predictions
// ---------------------------------------------------------------------------

/// A thresholded edge-sign prediction with optional ranking scores.
///
/// `labels` is symmetric with zero diagonal and entries in `{−1, 0, +1}`;
/// `scores`, when present, is symmetric with zero diagonal and its sign
/// agrees with every nonzero label (positive labels have positive scores).
#[derive(Debug, Clone)]
pub struct SignPrediction<S> {
    n: usize,
    labels: Array2<i8>,
    scores: Option<Array2<S>>,
}

impl<S: Scalar> SignPrediction<S> {
    /// Wraps and validates a label matrix and optional score matrix.
    pub fn new(labels: Array2<i8>, scores: Option<Array2<S>>) -> Result<Self> {
        let (rows, cols) = labels.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let n = rows;
        for i in 0..n {
            if labels[[i, i]] != 0 {
                return Err(Error::invalid_parameter(
                    "labels",
                    "diagonal must be zero",
                ));
            }
            for j in 0..n {
                if !(-1..=1).contains(&labels[[i, j]]) {
                    return Err(Error::invalid_parameter(
                        "labels",
                        "entries must be -1, 0 or +1",
                    ));
                }
                if labels[[i, j]] != labels[[j, i]] {
                    return Err(Error::invalid_parameter(
                        "labels",
                        "matrix must be symmetric",
                    ));
                }
            }
        }
        if let Some(s) = &scores {
            if s.dim() != (n, n) {
                return Err(Error::DimensionMismatch {
                    context: "score matrix size",
                    expected: n,
                    got: s.nrows(),
                });
            }
            for i in 0..n {
                if s[[i, i]] != S::zero() {
                    return Err(Error::invalid_parameter(
                        "scores",
                        "diagonal must be zero",
                    ));
                }
                for j in 0..n {
                    if s[[i, j]] != s[[j, i]] {
                        return Err(Error::invalid_parameter(
                            "scores",
                            "matrix must be symmetric",
                        ));
                    }
                    let label = labels[[i, j]];
                    let score = s[[i, j]];
                    if (label > 0 && !(score > S::zero()))
                        || (label < 0 && !(score < S::zero()))
                    {
                        return Err(Error::invalid_parameter(
                            "scores",
                            "sign must agree with nonzero labels",
                        ));
                    }
                }
            }
        }
        Ok(Self { n, labels, scores })
    }

    /// Builds the reference prediction of a known graph: labels from edge
    /// signs, scores from signed weights.
    pub fn from_graph(graph: &SignedGraph<S>) -> Self {
        let n = graph.node_count();
        let mut labels = Array2::zeros((n, n));
        let mut scores = Array2::zeros((n, n));
        for e in graph.edges() {
            let l = match e.sign {
                Sign::Positive => 1,
                Sign::Negative => -1,
            };
            labels[[e.i, e.j]] = l;
            labels[[e.j, e.i]] = l;
            let s = e.signed_weight();
            scores[[e.i, e.j]] = s;
            scores[[e.j, e.i]] = s;
        }
        Self {
            n,
            labels,
            scores: Some(scores),
        }
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// The symmetric label matrix with entries in `{−1, 0, +1}`.
    pub fn labels(&self) -> &Array2<i8> {
        &self.labels
    }

    /// Label of the unordered pair `(i, j)`.
    pub fn label(&self, i: usize, j: usize) -> i8 {
        self.labels[[i, j]]
    }

    /// The symmetric score matrix, if ranking scores are available.
    pub fn scores(&self) -> Option<&Array2<S>> {
        self.scores.as_ref()
    }
}

/// Default classification threshold for an `n`-node recovery.
///
/// The solver spreads a trace budget of `n` over `n(n−1)/2` pairs, so
/// `n/d` is the scale of a typical nonzero entry; the threshold is six
/// orders of magnitude below that.
pub fn default_classification_tol(n: usize) -> f64 {
    1e-6 * n as f64 / edge_count(n) as f64
}

/// Thresholds a recovered pair into a sign prediction.
///
/// A pair is labeled `+1` when its positive weight `−ℓ⁺` exceeds `tol`,
/// `−1` when its negative weight `−ℓ⁻` does (the positive rule wins if
/// both fire, which a complementary pair never triggers), and `0`
/// otherwise. Scores are the signed strengths `(−ℓ⁺) − (−ℓ⁻)`.
/// With `tol = None` the threshold is [`default_classification_tol`].
pub fn classify_edges<S: Scalar>(
    pair: &LaplacianPairVec<S>,
    tol: Option<S>,
) -> SignPrediction<S> {
    let n = pair.node_count();
    let tol = tol.unwrap_or_else(|| S::from_f64_lossy(default_classification_tol(n)));
    let mut labels = Array2::zeros((n, n));
    let mut scores = Array2::zeros((n, n));
    for (e, (i, j)) in pair_iter(n).enumerate() {
        let wpos = -pair.lpos.array()[e];
        let wneg = -pair.lneg.array()[e];
        let label = if wpos > tol {
            1
        } else if wneg > tol {
            -1
        } else {
            0
        };
        labels[[i, j]] = label;
        labels[[j, i]] = label;
        let s = wpos - wneg;
        // Clamp the stored score to the label where thresholding zeroed it,
        // so the invariant "scores agree with labels" holds exactly.
        let s = match label {
            1 if !(s > S::zero()) => S::epsilon(),
            -1 if !(s < S::zero()) => -S::epsilon(),
            _ => s,
        };
        scores[[i, j]] = s;
        scores[[j, i]] = s;
    }
    SignPrediction {
        n,
        labels,
        scores: Some(scores),
    }
}

// ---------------------------------------------------------------------------
// Classification metrics
// ---------------------------------------------------------------------------

/// Binary F1 per sign plus their average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Scores {
    /// `(f1_pos + f1_neg) / 2`.
    pub macro_f1: f64,
    /// F1 of the positive-edge support.
    pub f1_pos: f64,
    /// F1 of the negative-edge support.
    pub f1_neg: f64,
}

fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    if tp + fp + fn_ == 0 {
        // Empty support, empty prediction: nothing to get wrong.
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    }
}

/// Scores a prediction against the true signed graph with per-sign binary
/// F1 over unordered pairs, averaged into a macro F1.
///
/// A sign class with empty true support scores 1 when the prediction is
/// also empty and 0 when it predicts any edge of that sign.
pub fn macro_f1<S: Scalar>(
    pred: &SignPrediction<S>,
    truth: &SignedGraph<S>,
) -> Result<F1Scores> {
    if pred.node_count() != truth.node_count() {
        return Err(Error::DimensionMismatch {
            context: "prediction node count",
            expected: truth.node_count(),
            got: pred.node_count(),
        });
    }
    let truth_labels = SignPrediction::from_graph(truth);
    let mut counts = [[0usize; 3]; 2]; // [sign][tp, fp, fn]
    for (i, j) in pair_iter(truth.node_count()) {
        let t = truth_labels.label(i, j);
        let p = pred.label(i, j);
        for (slot, sign) in [(0usize, 1i8), (1usize, -1i8)] {
            match (t == sign, p == sign) {
                (true, true) => counts[slot][0] += 1,
                (false, true) => counts[slot][1] += 1,
                (true, false) => counts[slot][2] += 1,
                (false, false) => {}
            }
        }
    }
    let f1_pos = f1_from_counts(counts[0][0], counts[0][1], counts[0][2]);
    let f1_neg = f1_from_counts(counts[1][0], counts[1][1], counts[1][2]);
    Ok(F1Scores {
        macro_f1: (f1_pos + f1_neg) / 2.0,
        f1_pos,
        f1_neg,
    })
}

// ---------------------------------------------------------------------------
// Ranking metrics
// ---------------------------------------------------------------------------

/// Per-sign areas under the precision-recall curve and their
/// baseline-normalized average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuprcScores {
    /// Mean of `auprc±/δ±` over the signs with nonempty true support.
    pub ratio: f64,
    /// AUPRC of the positive sign (`None` when the truth has no positive
    /// edges; that sign is then excluded from the ratio).
    pub auprc_pos: Option<f64>,
    /// AUPRC of the negative sign (`None` when the truth has no negative
    /// edges).
    pub auprc_neg: Option<f64>,
}

/// Area under the precision-recall curve by descending score.
///
/// Thresholds sweep the distinct score values; each tie group enters
/// atomically. With `T` true pairs, `AUPRC = Σ_g Δtp_g·P_g / T`, which makes
/// a perfect ranking exactly 1 and an all-tied ranking exactly the class
/// density.
fn auprc(ranked: &mut [(f64, bool)]) -> f64 {
    let total_true = ranked.iter().filter(|&&(_, t)| t).count();
    debug_assert!(total_true > 0);
    ranked.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut weighted = 0.0;
    let mut g = 0;
    while g < ranked.len() {
        let score = ranked[g].0;
        let mut group_tp = 0usize;
        let mut group_fp = 0usize;
        while g < ranked.len() && ranked[g].0 == score {
            if ranked[g].1 {
                group_tp += 1;
            } else {
                group_fp += 1;
            }
            g += 1;
        }
        tp += group_tp;
        fp += group_fp;
        if group_tp > 0 {
            let precision = tp as f64 / (tp + fp) as f64;
            weighted += group_tp as f64 * precision;
        }
    }
    weighted / total_true as f64
}

/// Ranks all pairs by recovered strength and scores each sign's
/// precision-recall area against the random baseline.
///
/// Positive edges are ranked by descending score, negative edges by
/// ascending score (so a strongly negative score is the best negative
/// candidate). The baseline `δ±` is the sign's density among all pairs;
/// `ratio` averages `AUPRC±/δ±` over the signs that exist in the truth.
///
/// Errors: the prediction must carry scores, and the truth must have at
/// least one edge.
pub fn auprc_ratio<S: Scalar>(
    pred: &SignPrediction<S>,
    truth: &SignedGraph<S>,
) -> Result<AuprcScores> {
    if pred.node_count() != truth.node_count() {
        return Err(Error::DimensionMismatch {
            context: "prediction node count",
            expected: truth.node_count(),
            got: pred.node_count(),
        });
    }
    let scores = pred
        .scores()
        .ok_or_else(|| Error::invalid_parameter("scores", "ranking needs a score matrix"))?;
    let n = truth.node_count();
    let pairs_total = edge_count(n);
    let truth_labels = SignPrediction::from_graph(truth);

    let evaluate = |sign: i8| -> Option<f64> {
        let mut ranked: Vec<(f64, bool)> = Vec::with_capacity(pairs_total);
        let mut true_count = 0usize;
        for (i, j) in pair_iter(n) {
            let is_true = truth_labels.label(i, j) == sign;
            if is_true {
                true_count += 1;
            }
            let s = scores[[i, j]].to_f64_lossy();
            let key = if sign > 0 { s } else { -s };
            ranked.push((key, is_true));
        }
        if true_count == 0 {
            return None;
        }
        Some(auprc(&mut ranked))
    };

    let auprc_pos = evaluate(1);
    let auprc_neg = evaluate(-1);
    if auprc_pos.is_none() && auprc_neg.is_none() {
        return Err(Error::UndefinedMetric);
    }
    let mut ratio_sum = 0.0;
    let mut ratio_count = 0usize;
    if let Some(a) = auprc_pos {
        let delta = truth.positive_edge_count() as f64 / pairs_total as f64;
        ratio_sum += a / delta;
        ratio_count += 1;
    }
    if let Some(a) = auprc_neg {
        let delta = truth.negative_edge_count() as f64 / pairs_total as f64;
        ratio_sum += a / delta;
        ratio_count += 1;
    }
    Ok(AuprcScores {
        ratio: ratio_sum / ratio_count as f64,
        auprc_pos,
        auprc_neg,
    })
}

// ---------------------------------------------------------------------------
// Estimation error
// ---------------------------------------------------------------------------

/// Frobenius distance between recovered and true Laplacian halves,
/// `√(‖L̂⁺−L₀⁺‖²_F + ‖L̂⁻−L₀⁻‖²_F)`.
///
/// The solver constrains each recovered half to trace `2n`, so both truth
/// halves are rescaled to trace `2n` before comparison (a half with zero
/// trace — no edges of that sign — is left as is). Without this
/// normalization the distance would mostly measure the arbitrary weight
/// scale of the ground truth.
pub fn frob_error<S: Scalar>(
    pair: &LaplacianPairVec<S>,
    truth: &SignedGraph<S>,
) -> Result<f64> {
    let n = truth.node_count();
    if pair.node_count() != n {
        return Err(Error::DimensionMismatch {
            context: "recovered pair node count",
            expected: n,
            got: pair.node_count(),
        });
    }
    let (est_pos, est_neg, _) = laplacians_from_vec(pair);
    let (mut true_pos, mut true_neg) = truth.split_laplacians();
    let target = S::from_f64_lossy(2.0 * n as f64);
    for side in [&mut true_pos, &mut true_neg] {
        let trace = (0..n).map(|i| side[[i, i]]).sum::<S>();
        if trace > S::zero() {
            let scale = target / trace;
            side.mapv_inplace(|v| v * scale);
        }
    }
    let mut acc = S::zero();
    for (est, tru) in [(&est_pos, &true_pos), (&est_neg, &true_neg)] {
        for (a, b) in est.iter().zip(tru.iter()) {
            let d = *a - *b;
            acc += d * d;
        }
    }
    Ok(acc.sqrt().to_f64_lossy())
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

/// Which metric picks the winning cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMetric {
    /// Maximize macro F1.
    MacroF1,
    /// Maximize the baseline-normalized AUPRC average.
    AuprcRatio,
}

/// A sweep over regularization weight pairs.
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Candidate values for the positive-part weight.
    pub alpha1_values: Vec<f64>,
    /// Candidate values for the negative-part weight.
    pub alpha2_values: Vec<f64>,
    /// Metric that selects the winner.
    pub metric: SelectionMetric,
}

impl GridSpec {
    /// Checks that both value lists are nonempty, positive and finite.
    pub fn validate(&self) -> Result<()> {
        for (name, values) in [
            ("alpha1_values", &self.alpha1_values),
            ("alpha2_values", &self.alpha2_values),
        ] {
            if values.is_empty() {
                return Err(Error::invalid_parameter(name, "must be non-empty"));
            }
            if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(Error::invalid_parameter(
                    name,
                    "entries must be finite and > 0",
                ));
            }
        }
        Ok(())
    }
}

/// Logarithmic parameter ladder `10^(start + step·r)` for `r = 0..count`.
///
/// `log10_grid(-3.0, 0.1, 21)` is the standard 21-point decade-and-a-half
/// sweep from `1e-3` to `1e-1`.
pub fn log10_grid(start_exp: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|r| 10f64.powf(start_exp + step * r as f64))
        .collect()
}

/// Which solver a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    /// Full pair space.
    Exact,
    /// Candidate-set solver with this per-node neighbor count.
    Fast {
        /// Neighbors per rule (nearest and farthest).
        k: usize,
    },
}

/// One evaluated cell of the sweep.
#[derive(Debug, Clone)]
pub struct GridCell {
    /// Positive-part weight of this cell.
    pub alpha1: f64,
    /// Negative-part weight of this cell.
    pub alpha2: f64,
    /// Macro F1 against the truth (NaN when the cell failed).
    pub macro_f1: f64,
    /// Positive-sign F1.
    pub f1_pos: f64,
    /// Negative-sign F1.
    pub f1_neg: f64,
    /// Baseline-normalized AUPRC average; `None` when undefined.
    pub auprc_ratio: Option<f64>,
    /// Laplacian estimation error.
    pub frob_error: f64,
    /// Iterations the solver performed.
    pub iterations: usize,
    /// Wall-clock solve time in milliseconds (not reproducible run-to-run).
    pub runtime_ms: f64,
    /// Solver convergence flag.
    pub converged: bool,
    /// Failure description when the cell could not be evaluated.
    pub error: Option<String>,
}

impl GridCell {
    fn failed(alpha1: f64, alpha2: f64, message: String) -> Self {
        Self {
            alpha1,
            alpha2,
            macro_f1: f64::NAN,
            f1_pos: f64::NAN,
            f1_neg: f64::NAN,
            auprc_ratio: None,
            frob_error: f64::NAN,
            iterations: 0,
            runtime_ms: 0.0,
            converged: false,
            error: Some(message),
        }
    }

    fn selection_value(&self, metric: SelectionMetric) -> Option<f64> {
        if self.error.is_some() {
            return None;
        }
        match metric {
            SelectionMetric::MacroF1 => {
                if self.macro_f1.is_nan() {
                    None
                } else {
                    Some(self.macro_f1)
                }
            }
            SelectionMetric::AuprcRatio => self.auprc_ratio,
        }
    }
}

/// Result of a sweep: every cell in row-major `(α₁, α₂)` order plus the
/// index of the winner (if any cell produced the selection metric).
#[derive(Debug, Clone)]
pub struct GridSearchOutcome {
    /// All evaluated cells, `alpha1` outer, `alpha2` inner.
    pub cells: Vec<GridCell>,
    /// Index of the winning cell in `cells`.
    pub best: Option<usize>,
}

impl GridSearchOutcome {
    /// The winning cell, if any.
    pub fn best_cell(&self) -> Option<&GridCell> {
        self.best.map(|i| &self.cells[i])
    }
}

/// Picks the best cell: highest selection metric, ties broken by smaller
/// `(α₁, α₂)` lexicographically.
pub(crate) fn select_best(cells: &[GridCell], metric: SelectionMetric) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, cell) in cells.iter().enumerate() {
        let Some(value) = cell.selection_value(metric) else {
            continue;
        };
        let better = match best {
            None => true,
            Some((best_idx, best_value)) => {
                if value != best_value {
                    value > best_value
                } else {
                    let b = &cells[best_idx];
                    (cell.alpha1, cell.alpha2) < (b.alpha1, b.alpha2)
                }
            }
        };
        if better {
            best = Some((idx, value));
        }
    }
    best.map(|(idx, _)| idx)
}

/// Sweeps regularization weights over a fixed dataset.
///
/// The pairwise costs are computed once and shared by all cells; cells are
/// evaluated concurrently and collected in deterministic row-major order.
/// A failing cell records its error and is skipped by the winner selection
/// instead of aborting the sweep.
pub fn grid_search<S: Scalar>(
    x: &Array2<S>,
    grid: &GridSpec,
    truth: &SignedGraph<S>,
    solver: SolverChoice,
    base: &AdmmConfig,
) -> Result<GridSearchOutcome> {
    grid.validate()?;
    base.validate()?;
    if x.nrows() != truth.node_count() {
        return Err(Error::DimensionMismatch {
            context: "signal row count",
            expected: truth.node_count(),
            got: x.nrows(),
        });
    }

    // Shared, cell-independent preparation.
    enum Prepared<S: Scalar> {
        Exact {
            costs: crate::halfvec::EdgeVector<S>,
        },
        Fast {
            candidates: crate::solver::fast::CandidateEdgeSet,
            costs: Array1<S>,
        },
    }
    let prepared = match solver {
        SolverChoice::Exact => Prepared::Exact {
            costs: compute_k(x)?,
        },
        SolverChoice::Fast { k } => {
            let provider = BruteForceNeighbors::new(x)?;
            let candidates = build_candidates(&provider, k)?;
            let costs = candidate_costs(x, &candidates)?;
            Prepared::Fast { candidates, costs }
        }
    };

    let combos: Vec<(f64, f64)> = grid
        .alpha1_values
        .iter()
        .flat_map(|&a1| grid.alpha2_values.iter().map(move |&a2| (a1, a2)))
        .collect();

    let cells: Vec<GridCell> = combos
        .par_iter()
        .map(|&(alpha1, alpha2)| {
            let cfg = AdmmConfig {
                alpha1,
                alpha2,
                ..base.clone()
            };
            let started = Instant::now();
            let solved = match &prepared {
                Prepared::Exact { costs } => {
                    solve_from_costs(costs, &cfg, StopRule::Tolerance, None)
                }
                Prepared::Fast { candidates, costs } => {
                    solve_fast_from_costs(candidates, costs, &cfg, StopRule::Tolerance, None)
                }
            };
            let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
            let (result, _) = match solved {
                Ok(pair) => pair,
                Err(err) => return GridCell::failed(alpha1, alpha2, err.to_string()),
            };
            let pred = classify_edges(&result.pair, None);
            let f1 = match macro_f1(&pred, truth) {
                Ok(f1) => f1,
                Err(err) => return GridCell::failed(alpha1, alpha2, err.to_string()),
            };
            let ranking = auprc_ratio(&pred, truth).ok();
            let frob = match frob_error(&result.pair, truth) {
                Ok(v) => v,
                Err(err) => return GridCell::failed(alpha1, alpha2, err.to_string()),
            };
            GridCell {
                alpha1,
                alpha2,
                macro_f1: f1.macro_f1,
                f1_pos: f1.f1_pos,
                f1_neg: f1.f1_neg,
                auprc_ratio: ranking.map(|r| r.ratio),
                frob_error: frob,
                iterations: result.iterations,
                runtime_ms,
                converged: result.converged,
                error: None,
            }
        })
        .collect();

    let best = select_best(&cells, grid.metric);
    Ok(GridSearchOutcome { cells, best })
}
