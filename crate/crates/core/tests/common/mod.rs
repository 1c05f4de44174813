//! Shared oracles for the integration suites: a dense partial-pivot LU
//! solver, dense reconstructions of the operators the solver only ever
//! applies implicitly, an exhaustive support-pattern oracle for the recovery
//! problem on tiny graphs, and small statistics helpers.
//!
//! Everything here is written independently of the library's linear-algebra
//! shortcuts on purpose: these are the reference implementations the fast
//! paths are checked against.
#![allow(dead_code)] // each test binary uses its own subset of the oracles

use ndarray::{s, Array1, Array2, ArrayView1};
use signet::halfvec::{pair_iter, EdgeVector};

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot collapses (singular to working precision).
/// Cubic and bounds-checked — fine up to a few thousand unknowns.
pub fn lu_solve(mut a: Array2<f64>, mut b: Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "lu_solve needs a square matrix");
    assert_eq!(b.len(), n, "right-hand side length must match");
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &t| a[[r, col]].abs().total_cmp(&a[[t, col]].abs()))?;
        if !(a[[pivot, col]].abs() > f64::MIN_POSITIVE) {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                a.swap([col, j], [pivot, j]);
            }
            b.swap(col, pivot);
        }
        for r in col + 1..n {
            let f = a[[r, col]] / a[[col, col]];
            if f == 0.0 {
                continue;
            }
            let (prow, mut rrow) = a.multi_slice_mut((s![col, col..], s![r, col..]));
            rrow.scaled_add(-f, &prow);
            b[r] -= f * b[col];
        }
    }
    let mut x = Array1::zeros(n);
    for r in (0..n).rev() {
        let mut acc = b[r];
        for j in r + 1..n {
            acc -= a[[r, j]] * x[j];
        }
        x[r] = acc / a[[r, r]];
    }
    Some(x)
}

/// Dense Gram matrix of the degree-accumulation operator over a pair list.
///
/// Entry `(e, f)` counts the endpoints shared by pairs `e` and `f`: `2` on
/// the diagonal, `1` for pairs meeting in one node, `0` otherwise. With the
/// full pair list this is the matrix the closed-form solver inverts
/// implicitly; with a candidate list it is the reduced analog.
pub fn dense_qtq(pairs: &[(usize, usize)]) -> Array2<f64> {
    let d = pairs.len();
    let mut g = Array2::zeros((d, d));
    for (e, &(i, j)) in pairs.iter().enumerate() {
        for (f, &(u, v)) in pairs.iter().enumerate() {
            let shared = usize::from(i == u) + usize::from(i == v)
                + usize::from(j == u)
                + usize::from(j == v);
            g[[e, f]] = shared as f64;
        }
    }
    g
}

/// Dense `c·I + d·QᵀQ` over a pair list; see [`dense_qtq`].
pub fn dense_m(pairs: &[(usize, usize)], c: f64, d: f64) -> Array2<f64> {
    let mut m = dense_qtq(pairs) * d;
    for e in 0..pairs.len() {
        m[[e, e]] += c;
    }
    m
}

/// Entries above this are treated as infeasible when screening the
/// support-pattern QP solutions (they must be nonpositive; the slack only
/// absorbs LU roundoff).
pub const ORACLE_SUPPORT_TOL: f64 = 1e-12;

/// Per-support-pattern minima for one sign branch of the recovery problem.
///
/// For every nonempty subset `S` of pairs (bitmask index), solves the
/// equality-constrained QP
/// `min k_signedᵀu + α·uᵀ P_SS u  s.t.  Σu = -n` over `u ∈ ℝ^S`
/// via its KKT system, and keeps the optimal value when the minimizer is
/// entrywise nonpositive (within [`ORACLE_SUPPORT_TOL`]). `p` is the full
/// `QᵀQ + 2I` matrix. Entries stay `None` when the pattern's unconstrained
/// minimizer leaves the nonpositive orthant.
///
/// The global minimizer of the full problem restricted to its strict
/// support solves exactly this QP (its sign constraints are inactive
/// there), so scanning all patterns covers the global optimum.
pub fn side_table(
    k_signed: ArrayView1<'_, f64>,
    alpha: f64,
    p: &Array2<f64>,
    n_nodes: usize,
) -> Vec<Option<f64>> {
    assert!(alpha > 0.0, "the pattern QP needs a strictly convex quadratic");
    let d = k_signed.len();
    assert!(d < usize::BITS as usize, "pattern index must fit a usize");
    let target = -(n_nodes as f64);
    let mut table = vec![None; 1 << d];
    for mask in 1usize..(1 << d) {
        let members: Vec<usize> = (0..d).filter(|e| mask >> e & 1 == 1).collect();
        let s = members.len();
        let mut kkt = Array2::zeros((s + 1, s + 1));
        let mut rhs = Array1::zeros(s + 1);
        for (a, &ea) in members.iter().enumerate() {
            for (b, &eb) in members.iter().enumerate() {
                kkt[[a, b]] = 2.0 * alpha * p[[ea, eb]];
            }
            kkt[[a, s]] = 1.0;
            kkt[[s, a]] = 1.0;
            rhs[a] = -k_signed[ea];
        }
        rhs[s] = target;
        let Some(sol) = lu_solve(kkt, rhs) else {
            continue;
        };
        if (0..s).any(|a| sol[a] > ORACLE_SUPPORT_TOL) {
            continue;
        }
        let mut value = 0.0;
        for (a, &ea) in members.iter().enumerate() {
            value += k_signed[ea] * sol[a];
            for (b, &eb) in members.iter().enumerate() {
                value += alpha * sol[a] * p[[ea, eb]] * sol[b];
            }
        }
        table[mask] = Some(value);
    }
    table
}

/// Globally optimal objective of the recovery problem by exhaustion.
///
/// Enumerates every pair of disjoint nonempty support patterns (the
/// complementarity constraint forces disjoint supports, the trace
/// constraints force both nonempty), combines the per-side minima from
/// [`side_table`], and returns the smallest total. Exponential in the pair
/// count — callers must keep `n ≤ 5`.
pub fn enumeration_best_objective(k: &EdgeVector<f64>, alpha1: f64, alpha2: f64) -> f64 {
    let n = k.node_count();
    let d = k.len();
    assert!(d <= 12, "support enumeration is 3^d; keep the graph tiny");
    let pairs: Vec<(usize, usize)> = pair_iter(n).collect();
    let mut p = dense_qtq(&pairs);
    for e in 0..d {
        p[[e, e]] += 2.0;
    }
    let k_arr = k.array().to_owned();
    let k_neg = k_arr.mapv(|v| -v);
    let table_pos = side_table(k_arr.view(), alpha1, &p, n);
    let table_neg = side_table(k_neg.view(), alpha2, &p, n);
    let full = (1usize << d) - 1;
    let mut best = f64::INFINITY;
    for mask_pos in 1..=full {
        let Some(value_pos) = table_pos[mask_pos] else {
            continue;
        };
        let complement = full & !mask_pos;
        // Walk the nonempty submasks of the complement.
        let mut mask_neg = complement;
        while mask_neg != 0 {
            if let Some(value_neg) = table_neg[mask_neg] {
                let total = value_pos + value_neg;
                if total < best {
                    best = total;
                }
            }
            mask_neg = (mask_neg - 1) & complement;
        }
    }
    best
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "a slope needs at least two points");
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        cov += (x - mx) * (y - my);
        var += (x - mx) * (x - mx);
    }
    cov / var
}

/// Median by sorting a copy (average of the two middle values when even).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

/// Arithmetic mean.
pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    values.iter().sum::<f64>() / values.len() as f64
}
