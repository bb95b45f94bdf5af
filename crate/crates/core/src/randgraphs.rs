//! Seeded random graph families: Erdős–Rényi, random geometric and
//! Watts–Strogatz small-world graphs.
//!
//! Every call derives its own ChaCha8 generator from the seed. Structure is
//! drawn from stream 0 and weights from stream 1, so changing the weight rule
//! never changes the graph.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Digraph, Edge, GraphError, InWeighting, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("small-world degree {d} must be even and below n = {n}")]
    Degree { n: usize, d: usize },
    #[error("radius and side must be positive (radius {radius}, side {side})")]
    Geometry { radius: f64, side: f64 },
    #[error("cannot pick {wanted} edges from {available} node pairs")]
    EdgeCount { wanted: usize, available: usize },
    #[error("random orientation needs every link to be bidirectional")]
    NotUndirected,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    ErdosRenyi { n: usize, p: f64, directed: bool },
    Geometric { n: usize, radius: f64, side: f64 },
    SmallWorld { n: usize, d: usize, rewire_p: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    Unit,
    /// Negated Laplacian; a self-loop is added to every node with an in-link.
    Laplacian,
    /// Independent weights drawn uniformly from `[0.5, 1.5]`.
    #[default]
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
    #[serde(default)]
    pub weights: WeightRule,
}

fn structure_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

fn weight_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn check_probability(p: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GenError::Probability(p))
    }
}

/// Applies a weight rule; the Laplacian rule may add self-loops.
pub fn weigh(g: &Digraph, rule: WeightRule, seed: u64) -> Result<(Digraph, InWeighting), GenError> {
    match rule {
        WeightRule::Unit => Ok((g.clone(), InWeighting::unit(g))),
        WeightRule::Laplacian => {
            let loops: Vec<NodeId> = (0..g.n())
                .filter(|&v| g.in_neighbors(v).iter().any(|&u| u != v))
                .collect();
            let g = g.with_self_loops(loops);
            let a = InWeighting::laplacian(&g)?;
            Ok((g, a))
        }
        WeightRule::Uniform => {
            let mut rng = weight_rng(seed);
            let weights: Vec<(NodeId, NodeId, f64)> = g
                .edges()
                .map(|(t, h)| (t, h, rng.random_range(0.5..=1.5)))
                .collect();
            Ok((g.clone(), InWeighting::from_edge_weights(g, weights)?))
        }
    }
}

/// Erdős–Rényi structure: every ordered pair (directed) or unordered pair
/// (undirected, both arcs bidirectional) is present with probability `p`.
pub fn erdos_renyi_graph(n: usize, p: f64, directed: bool, seed: u64) -> Result<Digraph, GenError> {
    check_probability(p)?;
    let mut rng = structure_rng(seed);
    if directed {
        let mut edges = Vec::new();
        for t in 0..n {
            for h in 0..n {
                if t != h && rng.random_bool(p) {
                    edges.push((t, h));
                }
            }
        }
        Ok(Digraph::directed(n, edges)?)
    } else {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(p) {
                    pairs.push((a, b));
                }
            }
        }
        Ok(Digraph::undirected(n, pairs)?)
    }
}

fn points(n: usize, side: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = structure_rng(seed);
    (0..n)
        .map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side)))
        .collect()
}

fn pair_distances(pts: &[(f64, f64)]) -> Vec<(f64, Edge)> {
    let mut out = Vec::new();
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
            out.push((dx.hypot(dy), (a, b)));
        }
    }
    out
}

/// Random geometric graph: `n` uniform points in a square of the given side,
/// linked (undirected) when at most `radius` apart.
pub fn random_geometric_graph(n: usize, radius: f64, side: f64, seed: u64) -> Result<Digraph, GenError> {
    if radius <= 0.0 || side <= 0.0 {
        return Err(GenError::Geometry { radius, side });
    }
    let pts = points(n, side, seed);
    let pairs = pair_distances(&pts)
        .into_iter()
        .filter(|&(d, _)| d <= radius)
        .map(|(_, e)| e);
    Ok(Digraph::undirected(n, pairs)?)
}

/// Geometric graph whose radius is chosen so exactly `edges` undirected links
/// appear. Returns the graph and the radius used.
pub fn geometric_with_edge_count(
    n: usize,
    edges: usize,
    side: f64,
    seed: u64,
) -> Result<(Digraph, f64), GenError> {
    let pts = points(n, side, seed);
    let mut dists = pair_distances(&pts);
    if edges > dists.len() {
        return Err(GenError::EdgeCount {
            wanted: edges,
            available: dists.len(),
        });
    }
    dists.sort_by(|a, b| a.0.total_cmp(&b.0));
    let radius = match (edges.checked_sub(1).map(|i| dists[i].0), dists.get(edges)) {
        (Some(lo), Some(hi)) => 0.5 * (lo + hi.0),
        (Some(lo), None) => lo,
        (None, Some(hi)) => 0.5 * hi.0,
        (None, None) => side,
    };
    let pairs = dists[..edges].iter().map(|&(_, e)| e);
    Ok((Digraph::undirected(n, pairs)?, radius))
}

/// Keeps one arc of every bidirectional pair, chosen by a fair coin.
/// Self-loops are kept.
pub fn random_orientation(g: &Digraph, seed: u64) -> Result<Digraph, GenError> {
    if !g.is_undirected() {
        return Err(GenError::NotUndirected);
    }
    let mut rng = structure_rng(seed);
    rng.set_stream(2);
    let edges: Vec<Edge> = g
        .edges()
        .filter(|&(t, h)| t <= h)
        .map(|(t, h)| if t == h || rng.random_bool(0.5) { (t, h) } else { (h, t) })
        .collect();
    Ok(Digraph::directed(g.n(), edges)?)
}

/// Watts–Strogatz: a ring where each node links to `d/2` neighbours on each
/// side, then each visited link `{q, q+s}` is, with probability `rewire_p`,
/// replaced by `{q, r}` for a uniform `r` not yet adjacent to `q`.
pub fn watts_strogatz_graph(n: usize, d: usize, rewire_p: f64, seed: u64) -> Result<Digraph, GenError> {
    check_probability(rewire_p)?;
    if d % 2 != 0 || d >= n {
        return Err(GenError::Degree { n, d });
    }
    let mut adj = vec![vec![false; n]; n];
    for q in 0..n {
        for s in 1..=d / 2 {
            let r = (q + s) % n;
            adj[q][r] = true;
            adj[r][q] = true;
        }
    }
    let mut rng = structure_rng(seed);
    for q in 0..n {
        for s in 1..=d / 2 {
            let far = (q + s) % n;
            if !adj[q][far] || !rng.random_bool(rewire_p) {
                continue;
            }
            let free: Vec<NodeId> = (0..n).filter(|&r| r != q && !adj[q][r]).collect();
            if let Some(&r) = free.choose(&mut rng) {
                adj[q][far] = false;
                adj[far][q] = false;
                adj[q][r] = true;
                adj[r][q] = true;
            }
        }
    }
    let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
    let pairs: Vec<Edge> = pairs.filter(|&(a, b)| adj[a][b]).collect();
    Ok(Digraph::undirected(n, pairs)?)
}

/// Builds a weighted instance from a full specification.
pub fn generate(spec: &GenSpec) -> Result<(Digraph, InWeighting), GenError> {
    let g = match spec.family {
        Family::ErdosRenyi { n, p, directed } => erdos_renyi_graph(n, p, directed, spec.seed)?,
        Family::Geometric { n, radius, side } => random_geometric_graph(n, radius, side, spec.seed)?,
        Family::SmallWorld { n, d, rewire_p } => watts_strogatz_graph(n, d, rewire_p, spec.seed)?,
    };
    weigh(&g, spec.weights, spec.seed)
}

/// Generates and renders as an edge-list document.
pub fn generate_edge_list(spec: &GenSpec) -> Result<String, GenError> {
    let (g, a) = generate(spec)?;
    Ok(crate::edgelist::write(&g, &a))
}
