//! Signed graph container and the matrices derived from it.
//!
//! A signed graph stores undirected edges `(i, j)` with a strictly positive
//! weight and a sign. Its signed adjacency `A` has `A_ij = s_ij w_ij`; the
//! positive/negative split `A = A⁺ - A⁻` keeps the magnitudes of the
//! positive (resp. negative) edges in `A⁺` (resp. `A⁻`). Two Laplacians
//! matter here:
//!
//! - the **net Laplacian** `L = D_net - A` with `D_net = diag(A·1)`, whose
//!   low-frequency eigenvectors define smoothness for signed graphs (it is
//!   indefinite in general, and always annihilates the constant vector);
//! - the **signed Laplacian** `L_s = D_abs - A` with `D_abs = diag(|A|·1)`,
//!   kept for comparison: it is positive semidefinite and penalizes
//!   same-sign agreement across negative edges.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::halfvec::{edge_count, edge_index, EdgeVector};
use crate::scalar::Scalar;

/// Edge sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// The sign as a scalar factor, `+1` or `-1`.
    pub fn factor<S: Scalar>(self) -> S {
        match self {
            Sign::Positive => S::one(),
            Sign::Negative => -S::one(),
        }
    }

    /// Sign of a nonzero value.
    pub fn of<S: Scalar>(x: S) -> Sign {
        if x >= S::zero() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// The opposite sign.
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

/// One undirected signed edge with `i < j` and `weight > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedEdge<S> {
    pub i: usize,
    pub j: usize,
    pub weight: S,
    pub sign: Sign,
}

impl<S: Scalar> SignedEdge<S> {
    /// Builds an edge, normalizing endpoint order to `i < j`.
    pub fn new(i: usize, j: usize, weight: S, sign: Sign) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidEdge {
                i,
                j,
                reason: "self-loops are not allowed".into(),
            });
        }
        if !(weight > S::zero()) || !weight.is_finite() {
            return Err(Error::InvalidEdge {
                i,
                j,
                reason: format!("weight must be finite and > 0, got {weight}"),
            });
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Ok(SignedEdge { i, j, weight, sign })
    }

    /// Signed weight `s_ij * w_ij`.
    pub fn signed_weight(&self) -> S {
        self.sign.factor::<S>() * self.weight
    }
}

/// Undirected signed graph on nodes `0..n` with positively weighted edges.
///
/// Edges are stored sorted by `(i, j)`; duplicates are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph<S> {
    n: usize,
    edges: Vec<SignedEdge<S>>,
}

impl<S: Scalar> SignedGraph<S> {
    /// Builds a graph from an edge list, validating endpoints, weights and
    /// uniqueness. Requires `n >= 2`.
    pub fn new(n: usize, mut edges: Vec<SignedEdge<S>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid_parameter(
                "n",
                format!("a graph needs at least 2 nodes, got {n}"),
            ));
        }
        for e in &edges {
            if e.j >= n {
                return Err(Error::InvalidEdge {
                    i: e.i,
                    j: e.j,
                    reason: format!("endpoint out of range for n = {n}"),
                });
            }
        }
        edges.sort_by_key(|e| (e.i, e.j));
        if let Some(w) = edges.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::InvalidEdge {
                i: w[0].i,
                j: w[0].j,
                reason: "duplicate edge".into(),
            });
        }
        Ok(SignedGraph { n, edges })
    }

    /// Graph with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        SignedGraph::new(n, Vec::new())
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Edges sorted by `(i, j)`.
    pub fn edges(&self) -> &[SignedEdge<S>] {
        &self.edges
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of positive edges.
    pub fn positive_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.sign == Sign::Positive).count()
    }

    /// Number of negative edges.
    pub fn negative_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.sign == Sign::Negative).count()
    }

    /// Signed adjacency matrix `A` with `A_ij = s_ij w_ij`.
    pub fn adjacency(&self) -> Array2<S> {
        let mut a = Array2::zeros((self.n, self.n));
        for e in &self.edges {
            let w = e.signed_weight();
            a[[e.i, e.j]] = w;
            a[[e.j, e.i]] = w;
        }
        a
    }

    /// Splits the adjacency into the nonnegative pair `(A⁺, A⁻)` with
    /// `A = A⁺ - A⁻`: positive edges land in `A⁺`, magnitudes of negative
    /// edges in `A⁻`.
    pub fn decompose_adjacency(&self) -> (Array2<S>, Array2<S>) {
        let mut apos = Array2::zeros((self.n, self.n));
        let mut aneg = Array2::zeros((self.n, self.n));
        for e in &self.edges {
            let target = match e.sign {
                Sign::Positive => &mut apos,
                Sign::Negative => &mut aneg,
            };
            target[[e.i, e.j]] = e.weight;
            target[[e.j, e.i]] = e.weight;
        }
        (apos, aneg)
    }

    /// Net Laplacian `L = diag(A·1) - A`. Row sums are exactly zero, so the
    /// constant vector is always in its null space; the matrix is indefinite
    /// whenever negative edges dominate somewhere.
    pub fn net_laplacian(&self) -> Array2<S> {
        laplacian_of(&self.adjacency())
    }

    /// Ordinary Laplacians `(L⁺, L⁻)` of the split adjacency; both are
    /// positive semidefinite and `L⁺ - L⁻` equals the net Laplacian.
    pub fn split_laplacians(&self) -> (Array2<S>, Array2<S>) {
        let (apos, aneg) = self.decompose_adjacency();
        (laplacian_of(&apos), laplacian_of(&aneg))
    }

    /// Signed Laplacian `L_s = diag(|A|·1) - A` (absolute degrees).
    pub fn signed_laplacian(&self) -> Array2<S> {
        let mut l = Array2::zeros((self.n, self.n));
        for e in &self.edges {
            let w = e.signed_weight();
            l[[e.i, e.j]] = -w;
            l[[e.j, e.i]] = -w;
            l[[e.i, e.i]] += e.weight;
            l[[e.j, e.j]] += e.weight;
        }
        l
    }

    /// Edge-space view of the split `(ℓ⁺, ℓ⁻)`: pair `(i, j)` holds the
    /// negated weight on the side matching the edge sign.
    pub fn to_pair_vectors(&self) -> crate::halfvec::LaplacianPairVec<S> {
        let mut lpos = EdgeVector::zeros(self.n);
        let mut lneg = EdgeVector::zeros(self.n);
        for e in &self.edges {
            let idx = edge_index(e.i, e.j, self.n).expect("stored edges are valid pairs");
            match e.sign {
                Sign::Positive => lpos.array_mut()[idx] = -e.weight,
                Sign::Negative => lneg.array_mut()[idx] = -e.weight,
            }
        }
        crate::halfvec::LaplacianPairVec { lpos, lneg }
    }

    /// Whether the graph is structurally balanced: the nodes can be split in
    /// two camps with all positive edges inside a camp and all negative
    /// edges across. Checked by two-coloring each connected component
    /// (breadth-first), independent of how the graph was produced.
    pub fn is_balanced(&self) -> bool {
        let mut adj: Vec<Vec<(usize, Sign)>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push((e.j, e.sign));
            adj[e.j].push((e.i, e.sign));
        }
        let mut camp: Vec<Option<bool>> = vec![None; self.n];
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.n {
            if camp[start].is_some() {
                continue;
            }
            camp[start] = Some(false);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                let cu = camp[u].expect("queued nodes are colored");
                for &(v, sign) in &adj[u] {
                    let expected = match sign {
                        Sign::Positive => cu,
                        Sign::Negative => !cu,
                    };
                    match camp[v] {
                        None => {
                            camp[v] = Some(expected);
                            queue.push_back(v);
                        }
                        Some(cv) if cv != expected => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    /// Maximum possible number of edges, `n(n-1)/2`.
    pub fn pair_count(&self) -> usize {
        edge_count(self.n)
    }
}

/// `diag(A·1) - A` for a symmetric matrix `A`.
fn laplacian_of<S: Scalar>(a: &Array2<S>) -> Array2<S> {
    let n = a.nrows();
    let mut l = a.mapv(|x| -x);
    for i in 0..n {
        let mut deg = S::zero();
        for j in 0..n {
            if j != i {
                deg += a[[i, j]];
            }
        }
        l[[i, i]] = deg;
    }
    l
}
