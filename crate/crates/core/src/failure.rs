//! Failure scenarios and the perturbed in-weighting they induce.
//!
//! A failure removes edges from the graph at `t_f` and perturbs only the rows
//! of the in-weighting that belong to the heads of the removed edges.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Digraph, Edge, GraphError, InWeighting, NodeId, DEFAULT_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum FailureError {
    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) is not a bidirectional link")]
    NotBidirectional(NodeId, NodeId),
    #[error("explicit row {0} is not affected by the failure")]
    RowNotAffected(NodeId),
    #[error("explicit row {row} has {got} entries, expected {expected}")]
    RowLength {
        row: NodeId,
        got: usize,
        expected: usize,
    },
    #[error("perturbed matrix is not an in-weighting of the faulty graph: {0}")]
    Sparsity(GraphError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid scenario document: {0}")]
    Document(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailureKind {
    /// Edge `(j, i)` fails; row `i` is perturbed.
    Unidirectional(Edge),
    /// Both `(j, i)` and `(i, j)` fail together; rows `i` and `j` are perturbed.
    Bidirectional(Edge),
    /// Node `i` loses every incoming link except its self-loop.
    NodeIncoming(NodeId),
}

/// Replacement values for one perturbed row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowOverride {
    pub row: NodeId,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationRule {
    /// Zero the failed entries, leave everything else.
    ZeroOnly,
    /// Zero the failed entries and move their weight onto the diagonal so
    /// each affected row keeps its sum.
    RowRebalance,
    /// Caller-supplied rows; affected rows not listed fall back to `ZeroOnly`.
    ExplicitRow(Vec<RowOverride>),
}

impl PerturbationRule {
    /// `RowRebalance` for consensus-type matrices, `ZeroOnly` otherwise.
    pub fn default_for(a: &InWeighting) -> Self {
        if a.has_zero_row_sums(DEFAULT_TOL) {
            Self::RowRebalance
        } else {
            Self::ZeroOnly
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureScenario {
    pub kind: FailureKind,
    pub t_f: f64,
    /// `None` picks [`PerturbationRule::default_for`] the nominal matrix.
    pub rule: Option<PerturbationRule>,
}

impl FailureScenario {
    pub fn unidirectional(edge: Edge, t_f: f64) -> Self {
        Self {
            kind: FailureKind::Unidirectional(edge),
            t_f,
            rule: None,
        }
    }

    pub fn bidirectional(edge: Edge, t_f: f64) -> Self {
        Self {
            kind: FailureKind::Bidirectional(edge),
            t_f,
            rule: None,
        }
    }

    pub fn node_incoming(node: NodeId, t_f: f64) -> Self {
        Self {
            kind: FailureKind::NodeIncoming(node),
            t_f,
            rule: None,
        }
    }

    pub fn with_rule(mut self, rule: PerturbationRule) -> Self {
        self.rule = Some(rule);
        self
    }

    /// Edges the failure removes from `g`.
    pub fn removed_edges(&self, g: &Digraph) -> Vec<Edge> {
        match self.kind {
            FailureKind::Unidirectional(e) => vec![e],
            FailureKind::Bidirectional((j, i)) => vec![(j, i), (i, j)],
            FailureKind::NodeIncoming(i) => node_failure_edge_map(g, i),
        }
    }

    /// Rows of the in-weighting the failure may change.
    pub fn affected_rows(&self) -> Vec<NodeId> {
        match self.kind {
            FailureKind::Unidirectional((_, i)) => vec![i],
            FailureKind::Bidirectional((j, i)) => {
                let mut rows = vec![i, j];
                rows.sort_unstable();
                rows
            }
            FailureKind::NodeIncoming(i) => vec![i],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioDoc::from(self)).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FailureError> {
        let doc: ScenarioDoc =
            serde_json::from_str(text).map_err(|e| FailureError::Document(e.to_string()))?;
        doc.try_into()
    }
}

/// All non-loop in-edges of `i`.
pub fn node_failure_edge_map(g: &Digraph, i: NodeId) -> Vec<Edge> {
    g.in_neighbors(i)
        .iter()
        .filter(|&&q| q != i)
        .map(|&q| (q, i))
        .collect()
}

/// Removes the scenario's edges and perturbs the in-weighting per its rule.
pub fn apply_failure(
    g: &Digraph,
    a: &InWeighting,
    s: &FailureScenario,
) -> Result<(Digraph, InWeighting), FailureError> {
    if a.n() != g.n() {
        return Err(GraphError::DimensionMismatch {
            expected: g.n(),
            got: a.n(),
        }
        .into());
    }
    match s.kind {
        FailureKind::Unidirectional((j, i)) => {
            g.check_node(j)?;
            g.check_node(i)?;
            if !g.contains((j, i)) {
                return Err(FailureError::MissingEdge(j, i));
            }
        }
        FailureKind::Bidirectional((j, i)) => {
            g.check_node(j)?;
            g.check_node(i)?;
            for e in [(j, i), (i, j)] {
                if !g.contains(e) {
                    return Err(FailureError::MissingEdge(e.0, e.1));
                }
                if !g.is_bidirectional(e) {
                    return Err(FailureError::NotBidirectional(e.0, e.1));
                }
            }
        }
        FailureKind::NodeIncoming(i) => g.check_node(i)?,
    }
    let removed = s.removed_edges(g);
    let faulty = g.without_edges(&removed);
    let rows = s.affected_rows();
    let rule = s.rule.clone().unwrap_or_else(|| PerturbationRule::default_for(a));

    let mut m = a.matrix().clone();
    for &(t, h) in &removed {
        m[(h, t)] = 0.0;
    }
    match &rule {
        PerturbationRule::ZeroOnly => {}
        PerturbationRule::RowRebalance => {
            for &r in &rows {
                let lost: f64 = removed
                    .iter()
                    .filter(|&&(_, h)| h == r)
                    .map(|&(t, h)| a.get(h, t))
                    .sum();
                m[(r, r)] += lost;
            }
        }
        PerturbationRule::ExplicitRow(overrides) => {
            for o in overrides {
                if !rows.contains(&o.row) {
                    return Err(FailureError::RowNotAffected(o.row));
                }
                if o.values.len() != g.n() {
                    return Err(FailureError::RowLength {
                        row: o.row,
                        got: o.values.len(),
                        expected: g.n(),
                    });
                }
                for (q, &v) in o.values.iter().enumerate() {
                    m[(o.row, q)] = v;
                }
            }
        }
    }
    let perturbed = InWeighting::new(&faulty, m).map_err(FailureError::Sparsity)?;
    Ok((faulty, perturbed))
}

/// Perturbation-state inner products for each affected row.
#[derive(Debug, Clone, PartialEq)]
pub struct Assumption2Report {
    /// `(row, sum_q (abar_rq - a_rq) x_q)`.
    pub values: Vec<(NodeId, f64)>,
    /// Rows whose inner product is within tolerance of zero.
    pub violations: Vec<NodeId>,
}

impl Assumption2Report {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_assumption2(
    a: &InWeighting,
    perturbed: &InWeighting,
    x_tf: &[f64],
    rows: &[NodeId],
    tol: f64,
) -> Result<Assumption2Report, FailureError> {
    let n = a.n();
    if perturbed.n() != n || x_tf.len() != n {
        return Err(GraphError::DimensionMismatch {
            expected: n,
            got: if perturbed.n() != n { perturbed.n() } else { x_tf.len() },
        }
        .into());
    }
    let mut values = Vec::with_capacity(rows.len());
    let mut violations = Vec::new();
    for &r in rows {
        let v: f64 = (0..n)
            .map(|q| (perturbed.get(r, q) - a.get(r, q)) * x_tf[q])
            .sum();
        if v.abs() <= tol {
            violations.push(r);
        }
        values.push((r, v));
    }
    Ok(Assumption2Report { values, violations })
}

// JSON wire form. Node labels are 1-based.

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindTag {
    Unidirectional,
    Bidirectional,
    NodeIncoming,
}

#[derive(Serialize, Deserialize)]
struct RowDoc {
    row: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RuleDoc {
    ZeroOnly,
    RowRebalance,
    ExplicitRow { rows: Vec<RowDoc> },
}

#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    kind: KindTag,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    node: Option<usize>,
    t_f: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<RuleDoc>,
}

impl From<&FailureScenario> for ScenarioDoc {
    fn from(s: &FailureScenario) -> Self {
        let (kind, edges, node) = match s.kind {
            FailureKind::Unidirectional((j, i)) => {
                (KindTag::Unidirectional, vec![[j + 1, i + 1]], None)
            }
            FailureKind::Bidirectional((j, i)) => (
                KindTag::Bidirectional,
                vec![[j + 1, i + 1], [i + 1, j + 1]],
                None,
            ),
            FailureKind::NodeIncoming(i) => (KindTag::NodeIncoming, Vec::new(), Some(i + 1)),
        };
        let rule = s.rule.as_ref().map(|r| match r {
            PerturbationRule::ZeroOnly => RuleDoc::ZeroOnly,
            PerturbationRule::RowRebalance => RuleDoc::RowRebalance,
            PerturbationRule::ExplicitRow(rows) => RuleDoc::ExplicitRow {
                rows: rows
                    .iter()
                    .map(|o| RowDoc {
                        row: o.row + 1,
                        values: o.values.clone(),
                    })
                    .collect(),
            },
        });
        Self {
            kind,
            edges,
            node,
            t_f: s.t_f,
            rule,
        }
    }
}

impl TryFrom<ScenarioDoc> for FailureScenario {
    type Error = FailureError;

    fn try_from(doc: ScenarioDoc) -> Result<Self, FailureError> {
        let bad = |m: &str| FailureError::Document(m.to_string());
        let zero_based = |label: usize| label.checked_sub(1).ok_or_else(|| bad("node labels are 1-based"));
        let edge = |e: [usize; 2]| -> Result<Edge, FailureError> {
            Ok((zero_based(e[0])?, zero_based(e[1])?))
        };
        let kind = match doc.kind {
            KindTag::Unidirectional => match doc.edges.as_slice() {
                [e] => FailureKind::Unidirectional(edge(*e)?),
                _ => return Err(bad("unidirectional failure needs exactly one edge")),
            },
            KindTag::Bidirectional => match doc.edges.as_slice() {
                [e] => FailureKind::Bidirectional(edge(*e)?),
                [e, r] if e[0] == r[1] && e[1] == r[0] => FailureKind::Bidirectional(edge(*e)?),
                _ => return Err(bad("bidirectional failure needs one edge or a reverse pair")),
            },
            KindTag::NodeIncoming => match doc.node {
                Some(v) => FailureKind::NodeIncoming(zero_based(v)?),
                None => return Err(bad("node_incoming failure needs `node`")),
            },
        };
        if !doc.t_f.is_finite() {
            return Err(bad("t_f must be finite"));
        }
        let rule = match doc.rule {
            None => None,
            Some(RuleDoc::ZeroOnly) => Some(PerturbationRule::ZeroOnly),
            Some(RuleDoc::RowRebalance) => Some(PerturbationRule::RowRebalance),
            Some(RuleDoc::ExplicitRow { rows }) => Some(PerturbationRule::ExplicitRow(
                rows.into_iter()
                    .map(|r| {
                        Ok(RowOverride {
                            row: zero_based(r.row)?,
                            values: r.values,
                        })
                    })
                    .collect::<Result<_, FailureError>>()?,
            )),
        };
        Ok(Self {
            kind,
            t_f: doc.t_f,
            rule,
        })
    }
}
