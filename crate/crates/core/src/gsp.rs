//! Spectral analysis on signed graphs: net-Laplacian spectrum with its
//! positive-semidefinite shift, graph Fourier transform, smoothness
//! measures, and low-pass filters defined on the normalized spectrum.
//!
//! The net Laplacian is indefinite, so frequencies are ordered by the
//! *shifted* spectrum `L + γI` with `γ >= |λ_min|`: the most negative
//! eigenvalue becomes frequency zero. Filters are evaluated on the min-max
//! normalized eigenvalues so that one `η` means the same attenuation
//! profile for every graph.

use ndarray::{Array1, Array2, ArrayView1};

use crate::eigh::symmetric_eigen;
use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::halfvec::SYMMETRY_RTOL;
use crate::scalar::Scalar;

/// How to pick the diagonal shift that makes `L + γI` positive
/// semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaPolicy<S> {
    /// `γ = max(0, -λ_min)`: the smallest shift that works.
    Auto,
    /// A caller-supplied shift; rejected if it is negative or smaller than
    /// `-λ_min`.
    Fixed(S),
}

/// Eigendecomposition of a net Laplacian together with its shift.
#[derive(Debug, Clone)]
pub struct NetSpectrum<S> {
    eigenvalues: Array1<S>,
    eigenvectors: Array2<S>,
    gamma: S,
}

impl<S: Scalar> NetSpectrum<S> {
    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues of the (unshifted) net Laplacian, ascending.
    pub fn eigenvalues(&self) -> &Array1<S> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &Array2<S> {
        &self.eigenvectors
    }

    /// The shift `γ` making `L + γI` positive semidefinite.
    pub fn gamma(&self) -> S {
        self.gamma
    }

    /// Shifted eigenvalues `λ + γ` (all nonnegative up to rounding).
    pub fn shifted_eigenvalues(&self) -> Array1<S> {
        let g = self.gamma;
        self.eigenvalues.mapv(|x| x + g)
    }

    /// Min-max normalized eigenvalues in `[0, 1]`. A degenerate spectrum
    /// (`λ_max == λ_min`, e.g. the empty graph) normalizes to all zeros.
    pub fn scaled_eigenvalues(&self) -> Array1<S> {
        let n = self.eigenvalues.len();
        if n == 0 {
            return Array1::zeros(0);
        }
        let lo = self.eigenvalues[0];
        let hi = self.eigenvalues[n - 1];
        let range = hi - lo;
        if range <= S::zero() {
            return Array1::zeros(n);
        }
        self.eigenvalues.mapv(|x| (x - lo) / range)
    }

    /// Graph Fourier transform `x̂ = Vᵀ x`.
    pub fn gft(&self, x: ArrayView1<'_, S>) -> Result<Array1<S>> {
        self.check_len(x.len())?;
        Ok(self.eigenvectors.t().dot(&x))
    }

    /// Inverse transform `x = V x̂`.
    pub fn igft(&self, xhat: ArrayView1<'_, S>) -> Result<Array1<S>> {
        self.check_len(xhat.len())?;
        Ok(self.eigenvectors.dot(&xhat))
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.node_count() {
            return Err(Error::DimensionMismatch {
                context: "signal length vs node count",
                expected: self.node_count(),
                got,
            });
        }
        Ok(())
    }
}

/// Eigendecomposition of a symmetric (net) Laplacian with shift selection.
///
/// The input must be square and symmetric within [`SYMMETRY_RTOL`].
pub fn spectrum<S: Scalar>(l: &Array2<S>, policy: GammaPolicy<S>) -> Result<NetSpectrum<S>> {
    let (rows, cols) = l.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let mut max_abs = S::zero();
    let mut max_dev = S::zero();
    for i in 0..rows {
        for j in i + 1..rows {
            max_abs = max_abs.max(l[[i, j]].abs());
            max_dev = max_dev.max((l[[i, j]] - l[[j, i]]).abs());
        }
        max_abs = max_abs.max(l[[i, i]].abs());
    }
    let tol = S::from_f64_lossy(SYMMETRY_RTOL) * max_abs.max(S::one());
    if max_dev > tol {
        return Err(Error::NotSymmetric {
            max_dev: max_dev.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }

    let (eigenvalues, eigenvectors) = symmetric_eigen(l)?;
    let lambda_min = if eigenvalues.is_empty() {
        S::zero()
    } else {
        eigenvalues[0]
    };
    let required = (-lambda_min).max(S::zero());
    let gamma = match policy {
        GammaPolicy::Auto => required,
        GammaPolicy::Fixed(g) => {
            // Tiny slack so a shift equal to |λ_min| up to rounding passes.
            let slack = S::from_f64_lossy(1e-12) * required.max(S::one());
            if g < S::zero() || g + slack < required {
                return Err(Error::ShiftTooSmall {
                    gamma: g.to_f64_lossy(),
                    required: required.to_f64_lossy(),
                });
            }
            g
        }
    };
    Ok(NetSpectrum {
        eigenvalues,
        eigenvectors,
        gamma,
    })
}

/// Smoothness of `x` with respect to the shifted net Laplacian:
/// `Σ_(i,j)∈E s_ij w_ij (x_i - x_j)² + γ ‖x‖²`, which equals
/// `xᵀ (L + γI) x`. Small values mean `x` agrees across positive edges and
/// disagrees across negative ones.
pub fn total_variation_net<S: Scalar>(
    x: ArrayView1<'_, S>,
    graph: &SignedGraph<S>,
    gamma: S,
) -> Result<S> {
    check_signal(x.len(), graph)?;
    let mut tv = S::zero();
    for e in graph.edges() {
        let diff = x[e.i] - x[e.j];
        tv += e.sign.factor::<S>() * e.weight * diff * diff;
    }
    Ok(tv + gamma * x.dot(&x))
}

/// Smoothness of `x` with respect to the signed Laplacian (absolute
/// degrees): `Σ_(i,j)∈E w_ij (x_i - s_ij x_j)²`, which equals `xᵀ L_s x`.
/// Unlike the net variant it penalizes *agreement* across negative edges.
pub fn total_variation_signed_laplacian<S: Scalar>(
    x: ArrayView1<'_, S>,
    graph: &SignedGraph<S>,
) -> Result<S> {
    check_signal(x.len(), graph)?;
    let mut tv = S::zero();
    for e in graph.edges() {
        let diff = x[e.i] - e.sign.factor::<S>() * x[e.j];
        tv += e.weight * diff * diff;
    }
    Ok(tv)
}

fn check_signal<S: Scalar>(len: usize, graph: &SignedGraph<S>) -> Result<()> {
    if len != graph.node_count() {
        return Err(Error::DimensionMismatch {
            context: "signal length vs node count",
            expected: graph.node_count(),
            got: len,
        });
    }
    Ok(())
}

/// Low-pass filter families on the normalized spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    /// `h(λ̂) = 1 / (λ̂ + η)`: sharp emphasis of the lowest frequencies.
    Gaussian,
    /// `h(λ̂) = exp(-η λ̂)`: exponential decay.
    Heat,
    /// `h(λ̂) = 1 / (1 + η λ̂)`: gentle rational rolloff.
    Tikhonov,
}

impl FilterKind {
    /// Canonical lowercase name (matches configuration files).
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Gaussian => "gaussian",
            FilterKind::Heat => "heat",
            FilterKind::Tikhonov => "tikhonov",
        }
    }
}

/// A filter family plus its sharpness parameter `η > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub eta: f64,
}

impl FilterSpec {
    pub fn new(kind: FilterKind, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::invalid_parameter(
                "eta",
                format!("filter sharpness must be finite and > 0, got {eta}"),
            ));
        }
        Ok(FilterSpec { kind, eta })
    }

    /// Frequency response at one normalized eigenvalue.
    pub fn response<S: Scalar>(&self, scaled_lambda: S) -> S {
        let eta = S::from_f64_lossy(self.eta);
        match self.kind {
            FilterKind::Gaussian => (scaled_lambda + eta).recip(),
            FilterKind::Heat => (-eta * scaled_lambda).exp(),
            FilterKind::Tikhonov => (S::one() + eta * scaled_lambda).recip(),
        }
    }
}

/// Frequency response of `filter` on every normalized eigenvalue of the
/// spectrum (same order as the eigenvalues).
pub fn filter_response<S: Scalar>(spec: &NetSpectrum<S>, filter: &FilterSpec) -> Array1<S> {
    spec.scaled_eigenvalues().mapv(|x| filter.response(x))
}

/// Builds the dense filtering operator `H = V h(Λ̂) Vᵀ`.
///
/// `H` is symmetric by construction (enforced exactly by symmetrizing the
/// rounded product) and its eigenvalues are exactly the filter responses.
pub fn build_filter<S: Scalar>(spec: &NetSpectrum<S>, filter: &FilterSpec) -> Result<Array2<S>> {
    FilterSpec::new(filter.kind, filter.eta)?; // re-validate eta
    let h = filter_response(spec, filter);
    let v = spec.eigenvectors();
    let n = spec.node_count();
    let mut scaled = v.clone();
    for (mut col, &hv) in scaled.columns_mut().into_iter().zip(h.iter()) {
        col.mapv_inplace(|x| x * hv);
    }
    let mut out = scaled.dot(&v.t());
    let half = S::from_f64_lossy(0.5);
    for i in 0..n {
        for j in i + 1..n {
            let avg = (out[[i, j]] + out[[j, i]]) * half;
            out[[i, j]] = avg;
            out[[j, i]] = avg;
        }
    }
    Ok(out)
}
