//! Symmetric eigendecomposition, self-contained and generic over [`Scalar`].
//!
//! The net Laplacian of a signed graph is symmetric but indefinite, so the
//! spectral code needs a full symmetric eigensolver rather than anything
//! that assumes positive definiteness. This module implements the classic
//! two-stage scheme: Householder reduction to tridiagonal form followed by
//! the implicitly shifted QL iteration with accumulated eigenvectors
//! (the EISPACK `tred2`/`tql2` pair, long in the public domain). It is
//! `O(n^3)` and comfortably handles the graph sizes this crate targets
//! (thousands of nodes) while keeping the whole crate a pure-Rust build
//! that works identically for `f32` and `f64`.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Maximum QL iterations per eigenvalue before reporting failure.
const MAX_QL_ITERATIONS: usize = 64;

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the **columns** of the returned matrix. Symmetry is the
/// caller's contract: only the lower triangle participates in the
/// reduction, and no symmetry check is performed here (callers that accept
/// arbitrary input validate first, e.g. via [`crate::halfvec::upper`]).
pub fn symmetric_eigen<S: Scalar>(a: &Array2<S>) -> Result<(Array1<S>, Array2<S>)> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    if n == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    let mut v = a.clone();
    let mut d = vec![S::zero(); n];
    let mut e = vec![S::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((Array1::from(d), v))
}

/// Householder reduction of `v` (symmetric, overwritten with the
/// accumulated orthogonal transform) to tridiagonal form: diagonal in `d`,
/// off-diagonal in `e[1..]`.
fn tred2<S: Scalar>(v: &mut Array2<S>, d: &mut [S], e: &mut [S]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[[n - 1, j]];
    }

    for i in (1..n).rev() {
        // Scale to avoid under/overflow while forming the reflector.
        let mut scale = S::zero();
        let mut h = S::zero();
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == S::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[[i - 1, j]];
                v[[i, j]] = S::zero();
                v[[j, i]] = S::zero();
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > S::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = S::zero();
            }

            // Apply the similarity transformation to the remaining block.
            for j in 0..i {
                let f = d[j];
                v[[j, i]] = f;
                let mut g = e[j] + v[[j, j]] * f;
                for k in j + 1..i {
                    g += v[[k, j]] * d[k];
                    e[k] += v[[k, j]] * f;
                }
                e[j] = g;
            }
            let mut f = S::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    let delta = f * e[k] + g * d[k];
                    v[[k, j]] -= delta;
                }
                d[j] = v[[i - 1, j]];
                v[[i, j]] = S::zero();
            }
        }
        d[i] = h;
    }

    // Accumulate the Householder transformations.
    for i in 0..n - 1 {
        v[[n - 1, i]] = v[[i, i]];
        v[[i, i]] = S::one();
        let h = d[i + 1];
        if h != S::zero() {
            for k in 0..=i {
                d[k] = v[[k, i + 1]] / h;
            }
            for j in 0..=i {
                let mut g = S::zero();
                for k in 0..=i {
                    g += v[[k, i + 1]] * v[[k, j]];
                }
                for k in 0..=i {
                    let delta = g * d[k];
                    v[[k, j]] -= delta;
                }
            }
        }
        for k in 0..=i {
            v[[k, i + 1]] = S::zero();
        }
    }
    for j in 0..n {
        d[j] = v[[n - 1, j]];
        v[[n - 1, j]] = S::zero();
    }
    v[[n - 1, n - 1]] = S::one();
    e[0] = S::zero();
}

/// Implicitly shifted QL iteration on the tridiagonal form, with
/// eigenvector accumulation into `v` and a final ascending sort.
fn tql2<S: Scalar>(v: &mut Array2<S>, d: &mut [S], e: &mut [S]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = S::zero();

    let mut f = S::zero();
    let mut tst1 = S::zero();
    let eps = S::epsilon();
    let two = S::from_f64_lossy(2.0);

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::EigenFailure {
                        index: l,
                        iterations: MAX_QL_ITERATIONS,
                    });
                }
                // Implicit shift from the leading 2x2.
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(S::one());
                if p < S::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // Implicit QL sweep from m down to l.
                p = d[m];
                let mut c = S::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = S::zero();
                let mut s2 = S::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        h = v[[k, i + 1]];
                        v[[k, i + 1]] = s * v[[k, i]] + c * h;
                        v[[k, i]] = c * v[[k, i]] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = S::zero();
    }

    // Ascending selection sort, swapping eigenvector columns along.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in i + 1..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                v.swap([j, i], [j, k]);
            }
        }
    }
    Ok(())
}
