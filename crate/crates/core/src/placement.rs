//! Greedy sensor placement for detection and isolation, exhaustive
//! minimum-cardinality oracles, and approximation-ratio reporting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeId;
use crate::relations::RelationIndex;

/// Largest node count the exhaustive searches accept.
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("exhaustive search over {n} nodes exceeds the limit of {limit}")]
    ScaleExceeded { n: usize, limit: usize },
}

/// Sensors in the order they were chosen, with the objective after each one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorSet {
    pub sensors: Vec<NodeId>,
    pub residuals: Vec<usize>,
}

impl SensorSet {
    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }
}

/// Detection is impossible: these classes relate to no node at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasible {
    pub undetectable: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsolationOutcome {
    Isolated(SensorSet),
    /// No node set isolates every class. `best_effort` is the greedy run
    /// continued to all of V; `residual` is `f_I(V)`.
    Empty { best_effort: SensorSet, residual: usize },
}

impl IsolationOutcome {
    pub fn is_isolated(&self) -> bool {
        matches!(self, IsolationOutcome::Isolated(_))
    }

    pub fn sensors(&self) -> Option<&SensorSet> {
        match self {
            IsolationOutcome::Isolated(s) => Some(s),
            IsolationOutcome::Empty { .. } => None,
        }
    }

    /// `f_I` of the final greedy set: 0 when isolated, `f_I(V)` otherwise.
    pub fn residual(&self) -> usize {
        match self {
            IsolationOutcome::Isolated(_) => 0,
            IsolationOutcome::Empty { residual, .. } => *residual,
        }
    }
}

/// Smallest index among the minimal values. Ties resolve to the smallest node.
fn argmin(scores: &[(NodeId, usize)]) -> Option<(NodeId, usize)> {
    scores
        .iter()
        .copied()
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
}

pub fn greedy_detection(idx: &RelationIndex) -> Result<SensorSet, Infeasible> {
    let all: Vec<NodeId> = (0..idx.n()).collect();
    let undetectable = idx.undetected(&all);
    if !undetectable.is_empty() {
        return Err(Infeasible { undetectable });
    }
    let mut uncovered = idx.undetected(&[]);
    let mut chosen = vec![false; idx.n()];
    let mut set = SensorSet {
        sensors: Vec::new(),
        residuals: Vec::new(),
    };
    while !uncovered.is_empty() {
        let scores: Vec<(NodeId, usize)> = (0..idx.n())
            .into_par_iter()
            .filter(|&v| !chosen[v])
            .map(|v| {
                let row = idx.node_row(v);
                (v, uncovered.iter().filter(|&&c| row[c] == 0).count())
            })
            .collect();
        let (v, residual) = argmin(&scores).expect("coverable classes imply a free node");
        chosen[v] = true;
        let row = idx.node_row(v);
        uncovered.retain(|&c| row[c] == 0);
        set.sensors.push(v);
        set.residuals.push(residual);
    }
    Ok(set)
}

/// Classes grouped by their signature over the current sensor set.
#[derive(Debug, Clone)]
struct Partition {
    block: Vec<usize>,
    blocks: usize,
}

impl Partition {
    fn new(classes: usize) -> Self {
        Self {
            block: vec![0; classes],
            blocks: usize::from(classes > 0),
        }
    }

    fn keys(&self, row: &[u32]) -> Vec<(usize, u32)> {
        self.block.iter().zip(row).map(|(&b, &k)| (b, k)).collect()
    }

    /// Number of classes sharing their block with another class after
    /// splitting by `row`.
    fn unresolved_after(&self, row: &[u32]) -> usize {
        let mut keys = self.keys(row);
        keys.sort_unstable();
        let mut count = 0;
        let mut i = 0;
        while i < keys.len() {
            let mut j = i + 1;
            while j < keys.len() && keys[j] == keys[i] {
                j += 1;
            }
            if j - i > 1 {
                count += j - i;
            }
            i = j;
        }
        count
    }

    fn refine(&mut self, row: &[u32]) {
        let mut ids = std::collections::HashMap::new();
        for (c, key) in self.keys(row).into_iter().enumerate() {
            let next = ids.len();
            self.block[c] = *ids.entry(key).or_insert(next);
        }
        self.blocks = ids.len();
    }

    fn unresolved(&self) -> usize {
        let mut sizes = vec![0usize; self.blocks];
        for &b in &self.block {
            sizes[b] += 1;
        }
        sizes.iter().filter(|&&s| s > 1).sum()
    }
}

/// Greedy isolation starting from `seed` (normally the detection set).
///
/// Nodes are added by smallest resulting `f_I` until `f_I = 0` or every node
/// is a sensor. A step that does not lower `f_I` is still taken, since a later
/// node may split the classes only in combination with it.
pub fn greedy_isolation(idx: &RelationIndex, seed: &SensorSet) -> IsolationOutcome {
    let n = idx.n();
    let mut partition = Partition::new(idx.class_count());
    let mut chosen = vec![false; n];
    let mut set = SensorSet {
        sensors: Vec::new(),
        residuals: Vec::new(),
    };
    for &v in &seed.sensors {
        if chosen[v] {
            continue;
        }
        chosen[v] = true;
        partition.refine(idx.node_row(v));
        set.sensors.push(v);
        set.residuals.push(partition.unresolved());
    }
    let mut current = partition.unresolved();
    while current > 0 && set.len() < n {
        let scores: Vec<(NodeId, usize)> = (0..n)
            .into_par_iter()
            .filter(|&v| !chosen[v])
            .map(|v| (v, partition.unresolved_after(idx.node_row(v))))
            .collect();
        let (v, residual) = argmin(&scores).expect("a free node remains");
        chosen[v] = true;
        partition.refine(idx.node_row(v));
        set.sensors.push(v);
        set.residuals.push(residual);
        current = residual;
    }
    if current == 0 {
        IsolationOutcome::Isolated(set)
    } else {
        IsolationOutcome::Empty {
            best_effort: set,
            residual: current,
        }
    }
}

fn check_scale(idx: &RelationIndex) -> Result<(), PlacementError> {
    if idx.n() > EXHAUSTIVE_LIMIT {
        return Err(PlacementError::ScaleExceeded {
            n: idx.n(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    Ok(())
}

/// Subsets of `0..n` in order of cardinality, then lexicographically; returns
/// the first one accepted by `ok`.
fn smallest_subset(n: usize, mut ok: impl FnMut(&[NodeId]) -> bool) -> Option<Vec<NodeId>> {
    for size in 0..=n {
        let mut comb: Vec<NodeId> = (0..size).collect();
        loop {
            if ok(&comb) {
                return Some(comb);
            }
            let Some(i) = (0..size).rev().find(|&i| comb[i] < n - size + i) else {
                break;
            };
            comb[i] += 1;
            for j in i + 1..size {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    None
}

fn exhaustive(
    idx: &RelationIndex,
    f: impl Fn(&[NodeId]) -> usize,
) -> Result<Option<SensorSet>, PlacementError> {
    check_scale(idx)?;
    Ok(smallest_subset(idx.n(), |m| f(m) == 0).map(|sensors| {
        let residuals = (1..=sensors.len()).map(|i| f(&sensors[..i])).collect();
        SensorSet { sensors, residuals }
    }))
}

/// A minimum-cardinality detection set, or `None` when none exists.
pub fn exhaustive_detection(idx: &RelationIndex) -> Result<Option<SensorSet>, PlacementError> {
    exhaustive(idx, |m| idx.f_d(m))
}

/// A minimum-cardinality isolation set, or `None` when none exists.
pub fn exhaustive_isolation(idx: &RelationIndex) -> Result<Option<SensorSet>, PlacementError> {
    exhaustive(idx, |m| idx.f_i(m))
}

/// `1 + ln |E|`, the greedy guarantee relative to the optimum.
pub fn ratio_bound(edge_count: usize) -> f64 {
    1.0 + (edge_count.max(1) as f64).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub greedy: usize,
    pub optimal: usize,
    pub ratio: f64,
    pub bound: f64,
    pub violated: bool,
}

pub fn approximation_report(
    greedy: &SensorSet,
    optimal: &SensorSet,
    edge_count: usize,
) -> ApproximationReport {
    let ratio = if optimal.is_empty() {
        if greedy.is_empty() {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        greedy.len() as f64 / optimal.len() as f64
    };
    let bound = ratio_bound(edge_count);
    ApproximationReport {
        greedy: greedy.len(),
        optimal: optimal.len(),
        ratio,
        bound,
        violated: ratio > bound,
    }
}

/// Wire form of a placement run (node labels are 1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementDoc {
    pub sensors: Vec<usize>,
    pub residuals: Vec<usize>,
    pub feasible: bool,
    pub ratio_bound: f64,
    pub z: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undetectable: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isolation: Option<IsolationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationDoc {
    pub feasible: bool,
    pub sensors: Vec<usize>,
    pub residuals: Vec<usize>,
    pub residual: usize,
}

fn labels(nodes: &[NodeId]) -> Vec<usize> {
    nodes.iter().map(|v| v + 1).collect()
}

impl PlacementDoc {
    pub fn new(
        idx: &RelationIndex,
        detection: &Result<SensorSet, Infeasible>,
        isolation: Option<&IsolationOutcome>,
        edge_count: usize,
    ) -> Self {
        let (sensors, residuals, undetectable) = match detection {
            Ok(s) => (labels(&s.sensors), s.residuals.clone(), Vec::new()),
            Err(inf) => (Vec::new(), Vec::new(), inf.undetectable.clone()),
        };
        let isolation = isolation.map(|out| {
            let (set, feasible) = match out {
                IsolationOutcome::Isolated(s) => (s, true),
                IsolationOutcome::Empty { best_effort, .. } => (best_effort, false),
            };
            IsolationDoc {
                feasible,
                sensors: labels(&set.sensors),
                residuals: set.residuals.clone(),
                residual: out.residual(),
            }
        });
        Self {
            sensors,
            residuals,
            feasible: detection.is_ok(),
            ratio_bound: ratio_bound(edge_count),
            z: idx.z(),
            undetectable,
            isolation,
        }
    }
}
