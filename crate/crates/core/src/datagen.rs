//! Synthetic signed graphs and smooth signals for benchmarking recovery.
//!
//! Graph models:
//! - **Signed Erdős–Rényi / Barabási–Albert**: draw an unsigned topology,
//!   assign each node a ±1 polarity, sign each edge positive exactly when
//!   its endpoints agree (which yields a balanced graph), then flip a
//!   controlled fraction `ζ` of edge signs to inject frustration.
//! - **Signed random geometric graph**: drop points on the unit square and
//!   connect each node positively to its nearest peers and negatively to its
//!   farthest ones.
//!
//! Signals are low-pass filtered white noise, `x = H·x₀`, optionally
//! perturbed by noise with an exact ℓ2 magnitude ratio. All draws are
//! deterministic functions of the spec seed; signal columns use independent
//! per-column generator streams so multi-threaded generation is bitwise
//! identical to serial generation.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Sign, SignedEdge, SignedGraph};
use crate::gsp::{build_filter, spectrum, FilterSpec, GammaPolicy};
use crate::halfvec::pair_iter;
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

/// Which random-graph family to draw from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    /// Erdős–Rényi: each pair is an edge independently with probability `p`.
    SignedEr {
        /// Edge probability, in `(0, 1]`.
        p: f64,
    },
    /// Barabási–Albert: growth from an `m_ba`-clique, each new node
    /// attaching to `m_ba` distinct existing nodes with probability
    /// proportional to their current degree (uniformly when all degrees
    /// are still zero).
    SignedBa {
        /// Edges added per new node, `≥ 1`.
        m_ba: usize,
    },
    /// Random geometric graph on `[0,1]²` with sign by proximity rank:
    /// positive to the `k_rgg` nearest, negative to the `k_rgg` farthest.
    SignedRgg {
        /// Neighbor count per rule, in `[1, n−1]`.
        k_rgg: usize,
    },
}

/// Full description of one graph draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphModelSpec {
    /// Model family and its parameter.
    pub kind: GraphModel,
    /// Number of nodes.
    pub n: usize,
    /// Fraction of edge signs to flip after polarity assignment
    /// (ER/BA only; ignored by the geometric model).
    pub zeta: f64,
    /// Seed of the draw.
    pub seed: u64,
}

impl GraphModelSpec {
    /// Checks the model parameters against their domains.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid_parameter("n", "need at least 2 nodes"));
        }
        if !self.zeta.is_finite() || !(0.0..=1.0).contains(&self.zeta) {
            return Err(Error::invalid_parameter("zeta", "must lie in [0, 1]"));
        }
        match self.kind {
            GraphModel::SignedEr { p } => {
                if !p.is_finite() || p <= 0.0 || p > 1.0 {
                    return Err(Error::invalid_parameter("p", "must lie in (0, 1]"));
                }
            }
            GraphModel::SignedBa { m_ba } => {
                if m_ba == 0 {
                    return Err(Error::invalid_parameter("m_ba", "must be ≥ 1"));
                }
                if m_ba > self.n {
                    return Err(Error::invalid_parameter(
                        "m_ba",
                        "seed clique cannot exceed the node count",
                    ));
                }
            }
            GraphModel::SignedRgg { k_rgg } => {
                if k_rgg == 0 || k_rgg > self.n - 1 {
                    return Err(Error::invalid_parameter(
                        "k_rgg",
                        "must lie in [1, n-1]",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Description of one signal-matrix draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalGenSpec {
    /// Spectral filter shaping the signals.
    pub filter: FilterSpec,
    /// Number of signal columns, `≥ 1`.
    pub m: usize,
    /// Noise magnitude as a percentage of each column's ℓ2 norm, `≥ 0`.
    pub noise_pct: f64,
    /// Seed of the draw.
    pub seed: u64,
}

impl SignalGenSpec {
    /// Checks the signal parameters against their domains.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid_parameter("m", "need at least one column"));
        }
        if !self.noise_pct.is_finite() || self.noise_pct < 0.0 {
            return Err(Error::invalid_parameter(
                "noise_pct",
                "must be finite and ≥ 0",
            ));
        }
        FilterSpec::new(self.filter.kind, self.filter.eta)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed from a root seed, a purpose tag and an index.
///
/// The map is a two-stage splitmix64 mix, so distinct `(purpose, index)`
/// pairs give statistically independent streams while staying a pure
/// function of the inputs. Callers assign each random purpose (graph draw,
/// signal draw, repeat number, …) its own tag instead of reusing one
/// generator sequentially, which keeps every artifact reproducible in
/// isolation.
pub fn derive_seed(root: u64, purpose: u64, index: u64) -> u64 {
    let a = splitmix64(root ^ splitmix64(purpose.wrapping_add(0x5851_F42D_4C95_7F2D)));
    splitmix64(a ^ splitmix64(index.wrapping_add(0x1405_7B7E_F767_814F)))
}

// ---------------------------------------------------------------------------
// Graph generation
// ---------------------------------------------------------------------------

fn draw_er_topology(n: usize, p: f64, rng: &mut ChaCha12Rng) -> Vec<(usize, usize)> {
    // rng.random::<f64>() is uniform on [0, 1), so p = 1 keeps every pair.
    pair_iter(n)
        .filter(|_| rng.random::<f64>() < p)
        .collect()
}

fn draw_ba_topology(n: usize, m_ba: usize, rng: &mut ChaCha12Rng) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut degree = vec![0usize; n];
    // Seed clique on the first m_ba nodes.
    for (i, j) in pair_iter(m_ba) {
        edges.push((i, j));
        degree[i] += 1;
        degree[j] += 1;
    }
    // Growth: each new node v attaches to m_ba distinct predecessors,
    // degree-proportionally, without replacement.
    for v in m_ba..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m_ba);
        for _ in 0..m_ba {
            let total: usize = (0..v)
                .filter(|u| !chosen.contains(u))
                .map(|u| degree[u])
                .sum();
            let target = if total == 0 {
                // All remaining candidates have degree zero (only possible
                // right after a 1-clique seed): fall back to a uniform pick.
                let pool: Vec<usize> = (0..v).filter(|u| !chosen.contains(u)).collect();
                pool[rng.random_range(0..pool.len())]
            } else {
                // Integer roulette wheel over current degrees.
                let mut ticket = rng.random_range(0..total);
                let mut pick = None;
                for u in (0..v).filter(|u| !chosen.contains(u)) {
                    if ticket < degree[u] {
                        pick = Some(u);
                        break;
                    }
                    ticket -= degree[u];
                }
                pick.expect("ticket lies below the total degree")
            };
            chosen.push(target);
        }
        for &u in &chosen {
            edges.push((u.min(v), u.max(v)));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    edges
}

/// Draws a signed Erdős–Rényi or Barabási–Albert graph.
///
/// The draw proceeds in a fixed stream order — topology, then node
/// polarities, then flip choices — so two specs differing only in `zeta`
/// share their topology and polarities. Sign assignment by polarity
/// agreement produces a balanced graph; exactly
/// `round_half_even(ζ·|E|)` uniformly-chosen edges then have their sign
/// flipped. All weights are 1.
pub fn gen_signed_er_ba<S: Scalar>(spec: &GraphModelSpec) -> Result<SignedGraph<S>> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let topology = match spec.kind {
        GraphModel::SignedEr { p } => draw_er_topology(spec.n, p, &mut rng),
        GraphModel::SignedBa { m_ba } => draw_ba_topology(spec.n, m_ba, &mut rng),
        GraphModel::SignedRgg { .. } => {
            return Err(Error::invalid_parameter(
                "kind",
                "geometric graphs are drawn by gen_signed_rgg",
            ));
        }
    };
    let polarity: Vec<bool> = (0..spec.n).map(|_| rng.random::<bool>()).collect();
    let mut signs: Vec<Sign> = topology
        .iter()
        .map(|&(i, j)| {
            if polarity[i] == polarity[j] {
                Sign::Positive
            } else {
                Sign::Negative
            }
        })
        .collect();
    let flips = (spec.zeta * topology.len() as f64).round_ties_even() as usize;
    if flips > 0 {
        for idx in rand::seq::index::sample(&mut rng, topology.len(), flips) {
            signs[idx] = signs[idx].flipped();
        }
    }
    let edges = topology
        .into_iter()
        .zip(signs)
        .map(|((i, j), sign)| SignedEdge::new(i, j, S::one(), sign))
        .collect::<Result<Vec<_>>>()?;
    SignedGraph::new(spec.n, edges)
}

/// Draws a signed random geometric graph.
///
/// `n` points are placed uniformly on `[0,1]²`; each node proposes positive
/// edges to its `k_rgg` nearest points and negative edges to its `k_rgg`
/// farthest. Proposals are merged by union; a pair proposed with both signs
/// (possible once `k_rgg ≥ (n−1)/2`) becomes positive — the near relation
/// wins. All weights are 1; `zeta` is ignored.
pub fn gen_signed_rgg<S: Scalar>(spec: &GraphModelSpec) -> Result<SignedGraph<S>> {
    spec.validate()?;
    let k = match spec.kind {
        GraphModel::SignedRgg { k_rgg } => k_rgg,
        _ => {
            return Err(Error::invalid_parameter(
                "kind",
                "gen_signed_rgg draws geometric graphs only",
            ));
        }
    };
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let points: Vec<(f64, f64)> = (0..spec.n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let mut merged: BTreeMap<(usize, usize), Sign> = BTreeMap::new();
    let mut propose = |i: usize, j: usize, sign: Sign| {
        let key = (i.min(j), i.max(j));
        merged
            .entry(key)
            .and_modify(|s| {
                if sign == Sign::Positive {
                    *s = Sign::Positive;
                }
            })
            .or_insert(sign);
    };
    for i in 0..spec.n {
        let mut order: Vec<(f64, usize)> = (0..spec.n)
            .filter(|&j| j != i)
            .map(|j| {
                let dx = points[i].0 - points[j].0;
                let dy = points[i].1 - points[j].1;
                (dx * dx + dy * dy, j)
            })
            .collect();
        order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in order.iter().take(k) {
            propose(i, j, Sign::Positive);
        }
        order.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, j) in order.iter().take(k) {
            propose(i, j, Sign::Negative);
        }
    }
    let edges = merged
        .into_iter()
        .map(|((i, j), sign)| SignedEdge::new(i, j, S::one(), sign))
        .collect::<Result<Vec<_>>>()?;
    SignedGraph::new(spec.n, edges)
}

/// Dispatches to the generator matching the spec's model family.
pub fn gen_graph<S: Scalar>(spec: &GraphModelSpec) -> Result<SignedGraph<S>> {
    match spec.kind {
        GraphModel::SignedEr { .. } | GraphModel::SignedBa { .. } => gen_signed_er_ba(spec),
        GraphModel::SignedRgg { .. } => gen_signed_rgg(spec),
    }
}

// ---------------------------------------------------------------------------
// Signal generation
// ---------------------------------------------------------------------------

fn standard_normal_column<S: Scalar>(n: usize, rng: &mut ChaCha12Rng) -> Array1<S> {
    // Draw in f64 and convert, so f32 and f64 runs share one stream.
    Array1::from_iter((0..n).map(|_| {
        let v: f64 = StandardNormal.sample(rng);
        S::from_f64_lossy(v)
    }))
}

/// Generates `m` smooth signal columns over a signed graph.
///
/// Each column is `x = H·x₀` with `x₀ ∼ 𝒩(0, I)` and `H` the requested
/// filter evaluated on the shifted net-Laplacian spectrum (automatic shift).
/// With `noise_pct = ε > 0` each column then receives an additive
/// perturbation of exact relative ℓ2 size: `x ← x + (ε/100)·‖x‖₂·u/‖u‖₂`
/// with `u ∼ 𝒩(0, I)` drawn after `x₀` from the same column stream.
///
/// Column `c` uses generator stream `(seed, c)`, so columns are independent
/// and the result does not depend on how the work is scheduled. Increasing
/// `m` extends the matrix: the first columns of an `m = 200` draw equal the
/// `m = 100` draw bitwise.
pub fn gen_signals<S: Scalar>(
    graph: &SignedGraph<S>,
    spec: &SignalGenSpec,
) -> Result<Array2<S>> {
    spec.validate()?;
    let n = graph.node_count();
    let net = graph.net_laplacian();
    let spec_decomp = spectrum(&net, GammaPolicy::Auto)?;
    let h = build_filter(&spec_decomp, &spec.filter)?;
    let noise_scale = S::from_f64_lossy(spec.noise_pct / 100.0);

    let columns: Vec<Array1<S>> = (0..spec.m)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
            rng.set_stream(c as u64);
            let x0 = standard_normal_column::<S>(n, &mut rng);
            let mut x = h.dot(&x0);
            if spec.noise_pct > 0.0 {
                let u = standard_normal_column::<S>(n, &mut rng);
                let x_norm = x.iter().map(|&v| v * v).sum::<S>().sqrt();
                let u_norm = u.iter().map(|&v| v * v).sum::<S>().sqrt();
                if u_norm > S::zero() {
                    let scale = noise_scale * x_norm / u_norm;
                    x.zip_mut_with(&u, |xi, &ui| *xi += scale * ui);
                }
            }
            x
        })
        .collect();

    let mut out = Array2::zeros((n, spec.m));
    for (c, col) in columns.into_iter().enumerate() {
        out.column_mut(c).assign(&col);
    }
    Ok(out)
}
