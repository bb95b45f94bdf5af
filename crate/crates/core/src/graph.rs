//! Digraphs, in-weightings, hop distances and walk-weight sums.
//!
//! Vertices are 0-based indices internally. The text formats in
//! [`crate::edgelist`] and the JSON documents use 1-based labels.
//!
//! A walk-weight sum over all length-`k` walks from `q` to `p` equals
//! `[A^k]_{pq}`; [`phi_matrix`] computes it from matrix powers and
//! [`phi_enumerate`] by explicit enumeration, so either can check the other.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

/// Vertex index, `0..n`.
pub type NodeId = usize;

/// A directed edge `(tail, head)`: the arc runs `tail -> head`.
pub type Edge = (NodeId, NodeId);

/// Default tolerance for walk-sum comparisons and genericity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("bidirectional edge ({0}, {1}) is not an edge of the graph")]
    BidirectionalNotEdge(NodeId, NodeId),
    #[error("bidirectional edge ({0}, {1}) has no bidirectional reverse")]
    BidirectionalMissingReverse(NodeId, NodeId),
    #[error("self-loop on {0} cannot be bidirectional")]
    SelfLoopBidirectional(NodeId),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("weight a[{p}][{q}] = {value} on a missing edge ({q}, {p})")]
    SparsityViolation { p: NodeId, q: NodeId, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("oracle scale exceeded: k = {k}, n = {n} (limit {limit})")]
    OracleScaleExceeded { k: usize, n: usize, limit: usize },
}

/// A directed graph on `n` vertices with a marked set of bidirectional links.
///
/// Self-loops are legal and take part in walks; they are never bidirectional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: BTreeSet<Edge>,
    bidirectional: BTreeSet<Edge>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
}

impl Digraph {
    /// Builds a digraph, validating ids, duplicates and the bidirectional set.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = Edge>,
        bidirectional: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (t, h) in edges {
            for v in [t, h] {
                if v >= n {
                    return Err(GraphError::NodeOutOfRange { node: v, n });
                }
            }
            if !set.insert((t, h)) {
                return Err(GraphError::DuplicateEdge(t, h));
            }
        }
        let bidirectional: BTreeSet<Edge> = bidirectional.into_iter().collect();
        for &(t, h) in &bidirectional {
            if t == h {
                return Err(GraphError::SelfLoopBidirectional(t));
            }
            if !set.contains(&(t, h)) {
                return Err(GraphError::BidirectionalNotEdge(t, h));
            }
            if !bidirectional.contains(&(h, t)) {
                return Err(GraphError::BidirectionalMissingReverse(t, h));
            }
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(t, h) in &set {
            out_adj[t].push(h);
            in_adj[h].push(t);
        }
        Ok(Self {
            n,
            edges: set,
            bidirectional,
            out_adj,
            in_adj,
        })
    }

    /// Directed graph with no bidirectional links.
    pub fn directed(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        Self::new(n, edges, [])
    }

    /// Undirected graph: each pair becomes two bidirectional arcs.
    pub fn undirected(n: usize, pairs: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        let mut arcs = Vec::new();
        for (a, b) in pairs {
            arcs.push((a, b));
            arcs.push((b, a));
        }
        Self::new(n, arcs.clone(), arcs)
    }

    /// Directed path `0 -> 1 -> ... -> n-1`.
    pub fn path(n: usize) -> Self {
        Self::directed(n, (1..n).map(|v| (v - 1, v))).expect("valid path")
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn cycle(n: usize) -> Self {
        Self::directed(n, (0..n).map(|v| (v, (v + 1) % n))).expect("valid cycle")
    }

    /// Complete digraph without self-loops; every link bidirectional if asked.
    pub fn complete(n: usize, bidirectional: bool) -> Self {
        let arcs: Vec<Edge> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let b = if bidirectional { arcs.clone() } else { Vec::new() };
        Self::new(n, arcs, b).expect("valid complete graph")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in `(tail, head)` lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn is_bidirectional(&self, e: Edge) -> bool {
        self.bidirectional.contains(&e)
    }

    pub fn bidirectional(&self) -> impl Iterator<Item = Edge> + '_ {
        self.bidirectional.iter().copied()
    }

    pub fn self_loops(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied().filter(|&(t, h)| t == h)
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[v]
    }

    /// Tails of all edges whose head is `v` (self-loop included if present).
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v]
    }

    /// True when every non-loop edge is bidirectional.
    pub fn is_undirected(&self) -> bool {
        self.edges
            .iter()
            .all(|&(t, h)| t == h || self.bidirectional.contains(&(t, h)))
    }

    /// Copy with the given edges removed; their bidirectional marks go with them.
    pub fn without_edges(&self, removed: &[Edge]) -> Self {
        let edges = self.edges.iter().copied().filter(|e| !removed.contains(e));
        let bidi: Vec<Edge> = self
            .bidirectional
            .iter()
            .copied()
            .filter(|&(t, h)| !removed.contains(&(t, h)) && !removed.contains(&(h, t)))
            .collect();
        Self::new(self.n, edges, bidi).expect("edge removal keeps a valid graph")
    }

    /// Copy with a self-loop added on each listed node that lacks one.
    pub fn with_self_loops(&self, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut edges = self.edges.clone();
        for v in nodes {
            edges.insert((v, v));
        }
        Self::new(self.n, edges, self.bidirectional.iter().copied())
            .expect("adding self-loops keeps a valid graph")
    }

    /// Same arcs, every bidirectional mark dropped.
    pub fn as_unidirectional(&self) -> Self {
        Self::new(self.n, self.edges.iter().copied(), []).expect("valid")
    }

    pub(crate) fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange { node: v, n: self.n })
        }
    }
}

/// Dense in-weighting: `a[(p, q)]` weights the edge `q -> p`.
#[derive(Debug, Clone, PartialEq)]
pub struct InWeighting {
    a: DMatrix<f64>,
}

impl InWeighting {
    /// Wraps `a` after checking it vanishes off the edge set of `g`.
    pub fn new(g: &Digraph, a: DMatrix<f64>) -> Result<Self, GraphError> {
        check_sparsity(g, &a)?;
        Ok(Self { a })
    }

    /// Builds from per-edge weights `(tail, head, w)`.
    pub fn from_edge_weights(
        g: &Digraph,
        weights: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
    ) -> Result<Self, GraphError> {
        let mut a = DMatrix::zeros(g.n(), g.n());
        for (t, h, w) in weights {
            g.check_node(t)?;
            g.check_node(h)?;
            a[(h, t)] = w;
        }
        Self::new(g, a)
    }

    /// Weight 1 on every edge, self-loops included.
    pub fn unit(g: &Digraph) -> Self {
        let mut a = DMatrix::zeros(g.n(), g.n());
        for (t, h) in g.edges() {
            a[(h, t)] = 1.0;
        }
        Self { a }
    }

    /// Negated in-degree Laplacian with unit off-diagonal weights.
    ///
    /// Rows sum to zero. Every node with an incoming link needs a self-loop
    /// in `g` to carry its diagonal entry.
    pub fn laplacian(g: &Digraph) -> Result<Self, GraphError> {
        let n = g.n();
        let mut a = DMatrix::zeros(n, n);
        for (t, h) in g.edges().filter(|&(t, h)| t != h) {
            a[(h, t)] = 1.0;
            a[(h, h)] -= 1.0;
        }
        Self::new(g, a)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.a
    }

    /// Weight on edge `q -> p`.
    pub fn get(&self, p: NodeId, q: NodeId) -> f64 {
        self.a[(p, q)]
    }

    /// True when every row sums to zero within `tol` (consensus-type matrix).
    pub fn has_zero_row_sums(&self, tol: f64) -> bool {
        self.a.row_iter().all(|r| r.sum().abs() <= tol)
    }
}

fn check_sparsity(g: &Digraph, a: &DMatrix<f64>) -> Result<(), GraphError> {
    let n = g.n();
    if a.nrows() != n || a.ncols() != n {
        return Err(GraphError::DimensionMismatch {
            expected: n,
            got: a.nrows().max(a.ncols()),
        });
    }
    for p in 0..n {
        for q in 0..n {
            let v = a[(p, q)];
            if v != 0.0 && !g.contains((q, p)) {
                return Err(GraphError::SparsityViolation { p, q, value: v });
            }
        }
    }
    Ok(())
}

/// Hop distances; `None` means unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<Option<usize>>,
}

impl DistanceTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance from `q` to `p`.
    pub fn get(&self, q: NodeId, p: NodeId) -> Option<usize> {
        self.dist[q * self.n + p]
    }

    pub fn has_unreachable_pairs(&self) -> bool {
        self.dist.iter().any(Option::is_none)
    }

    /// Largest finite distance (0 for a single node).
    pub fn max_finite(&self) -> usize {
        self.dist.iter().flatten().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for DistanceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|p| self.get(q, p).map_or("inf".to_string(), |d| d.to_string()))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// BFS from every source on the unweighted digraph.
pub fn all_pairs_distances(g: &Digraph) -> DistanceTable {
    let n = g.n();
    let mut dist = vec![None; n * n];
    let mut queue = VecDeque::new();
    for src in 0..n {
        let row = &mut dist[src * n..(src + 1) * n];
        row[src] = Some(0);
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = row[u].expect("queued nodes have a distance");
            for &v in g.out_neighbors(u) {
                if row[v].is_none() {
                    row[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    DistanceTable { n, dist }
}

/// Largest finite hop distance, with a flag for unreachable pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Diameter {
    pub value: usize,
    pub has_unreachable_pairs: bool,
}

pub fn diameter(g: &Digraph) -> Result<Diameter, GraphError> {
    if g.n() == 0 {
        return Err(GraphError::EmptyGraph);
    }
    Ok(diameter_of(&all_pairs_distances(g)))
}

pub fn diameter_of(d: &DistanceTable) -> Diameter {
    Diameter {
        value: d.max_finite(),
        has_unreachable_pairs: d.has_unreachable_pairs(),
    }
}

/// Cached powers `A^0 ..= A^max` of a square matrix.
#[derive(Debug, Clone)]
pub struct MatrixPowers {
    powers: Vec<DMatrix<f64>>,
}

impl MatrixPowers {
    pub fn new(a: &DMatrix<f64>, max: usize) -> Self {
        let mut powers = Vec::with_capacity(max + 1);
        powers.push(DMatrix::identity(a.nrows(), a.ncols()));
        for k in 1..=max {
            let next = a * &powers[k - 1];
            powers.push(next);
        }
        Self { powers }
    }

    pub fn max(&self) -> usize {
        self.powers.len() - 1
    }

    /// `A^k`; panics if `k` exceeds the cached range.
    pub fn get(&self, k: usize) -> &DMatrix<f64> {
        &self.powers[k]
    }
}

/// Sum of walk weights over all length-`k` walks `q -> p`, as `[A^k]_{pq}`.
pub fn phi_matrix(a: &InWeighting, k: usize, q: NodeId, p: NodeId) -> f64 {
    // e_p^T A^k e_q, propagated as a vector.
    let m = a.matrix();
    let mut v = nalgebra::DVector::zeros(m.nrows());
    v[q] = 1.0;
    for _ in 0..k {
        v = m * v;
    }
    v[p]
}

/// Largest `n` and `k` accepted by [`phi_enumerate`].
pub const ENUMERATION_LIMIT: usize = 12;

/// Walk-weight sum by explicit depth-first enumeration of walks.
pub fn phi_enumerate(
    g: &Digraph,
    a: &InWeighting,
    k: usize,
    q: NodeId,
    p: NodeId,
) -> Result<f64, GraphError> {
    if k > ENUMERATION_LIMIT || g.n() > ENUMERATION_LIMIT {
        return Err(GraphError::OracleScaleExceeded {
            k,
            n: g.n(),
            limit: ENUMERATION_LIMIT,
        });
    }
    g.check_node(q)?;
    g.check_node(p)?;

    fn walk(g: &Digraph, a: &InWeighting, at: NodeId, left: usize, p: NodeId, w: f64) -> f64 {
        if left == 0 {
            return if at == p { w } else { 0.0 };
        }
        g.out_neighbors(at)
            .iter()
            .map(|&next| walk(g, a, next, left - 1, p, w * a.get(next, at)))
            .sum()
    }
    Ok(walk(g, a, q, k, p, 1.0))
}

/// Pairs `(q, p)` whose shortest-walk weight sum is within `tol` of zero.
pub fn check_assumption1(g: &Digraph, a: &InWeighting, tol: f64) -> Vec<(NodeId, NodeId)> {
    let dist = all_pairs_distances(g);
    let powers = MatrixPowers::new(a.matrix(), dist.max_finite());
    let mut violations = Vec::new();
    for q in 0..g.n() {
        for p in 0..g.n() {
            if let Some(d) = dist.get(q, p) {
                if powers.get(d)[(p, q)].abs() <= tol {
                    violations.push((q, p));
                }
            }
        }
    }
    violations
}
