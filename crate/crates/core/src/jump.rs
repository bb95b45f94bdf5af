//! Derivative jumps at the failure instant.
//!
//! The exact jump in the `k`-th derivative of node `p` is
//!
//! ```text
//! Δ(p,k) = e_p' (Ā^k − A^k) x(t_f)
//!        + e_p' (Ā^{k−1} − A^{k−1}) B w(t_f)
//!        + Σ_{m=0}^{k−2} e_p' (Ā^m − A^m) B w^{(k−m−1)}(t_f)
//! ```
//!
//! [`oracle_jump`] evaluates it directly. [`predict_jump_theorem1`] uses the
//! walk-sum factorization that holds for `k <= dist(j, p)`, and
//! [`first_jump_order`] gives the purely structural prediction used for
//! sensor placement.

use nalgebra::DVector;
use thiserror::Error;

use crate::failure::FailureKind;
use crate::graph::{DistanceTable, InWeighting, MatrixPowers, NodeId};
use crate::signal::{InputSignal, SignalError};
use crate::simulate::Trajectory;

/// Jump threshold on oracle-computed values.
pub const ORACLE_THRESHOLD: f64 = 1e-7;
/// Jump threshold on simulation-derived values.
pub const SIMULATION_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JumpError {
    #[error("derivative order must be at least 1")]
    OrderTooLow,
    #[error("order {k} is outside the characterized range k <= {limit}")]
    UncharacterizedOrder { k: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("trajectory has no failure instant")]
    NoFailureInstant,
    #[error(transparent)]
    Signal(#[from] SignalError),
}

fn check_dims(a: &InWeighting, abar: &InWeighting, input: &InputSignal, x: &[f64]) -> Result<(), JumpError> {
    let n = a.n();
    for got in [abar.n(), input.n(), x.len()] {
        if got != n {
            return Err(JumpError::DimensionMismatch { expected: n, got });
        }
    }
    Ok(())
}

/// Exact jump `Δ(p, k)` from matrix powers.
#[allow(clippy::too_many_arguments)]
pub fn oracle_jump(
    a: &InWeighting,
    abar: &InWeighting,
    input: &InputSignal,
    x_tf: &[f64],
    t_f: f64,
    p: NodeId,
    k: usize,
) -> Result<f64, JumpError> {
    check_dims(a, abar, input, x_tf)?;
    if p >= a.n() {
        return Err(JumpError::NodeOutOfRange(p));
    }
    if k == 0 {
        return Err(JumpError::OrderTooLow);
    }
    let pa = MatrixPowers::new(a.matrix(), k);
    let pb = MatrixPowers::new(abar.matrix(), k);
    jump_from_powers(&pa, &pb, input, &DVector::from_column_slice(x_tf), t_f, k)
        .map(|v| v[p])
}

fn jump_from_powers(
    pa: &MatrixPowers,
    pb: &MatrixPowers,
    input: &InputSignal,
    x: &DVector<f64>,
    t_f: f64,
    k: usize,
) -> Result<DVector<f64>, JumpError> {
    let diff = |m: usize| pb.get(m) - pa.get(m);
    let mut out = diff(k) * x;
    if !input.is_zero() {
        out += diff(k - 1) * input.forcing(0, t_f)?;
        for m in 0..k.saturating_sub(1) {
            out += diff(m) * input.forcing(k - m - 1, t_f)?;
        }
    } else if k - 1 > input.max_order() {
        return Err(SignalError::DerivativeUnavailable {
            order: k - 1,
            max: input.max_order(),
        }
        .into());
    }
    Ok(out)
}

/// Observed nodes × derivative orders `1..=z`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTable {
    nodes: Vec<NodeId>,
    z: usize,
    values: Vec<Vec<f64>>,
}

impl JumpTable {
    pub fn new(nodes: Vec<NodeId>, z: usize, values: Vec<Vec<f64>>) -> Self {
        assert_eq!(nodes.len(), values.len());
        assert!(values.iter().all(|v| v.len() == z));
        Self { nodes, z, values }
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// `Δ(p, k)`; order 0 is always 0 since states are continuous.
    pub fn get(&self, p: NodeId, k: usize) -> Option<f64> {
        let row = self.nodes.iter().position(|&v| v == p)?;
        match k {
            0 => Some(0.0),
            k if k <= self.z => Some(self.values[row][k - 1]),
            _ => None,
        }
    }

    /// Smallest order with `|Δ| > threshold`, or 0.
    pub fn first_order_above(&self, p: NodeId, threshold: f64) -> Option<usize> {
        let row = self.nodes.iter().position(|&v| v == p)?;
        Some(
            self.values[row]
                .iter()
                .position(|v| v.abs() > threshold)
                .map_or(0, |i| i + 1),
        )
    }
}

/// Oracle jumps for every listed node and every order `1..=z`.
pub fn oracle_jump_table(
    a: &InWeighting,
    abar: &InWeighting,
    input: &InputSignal,
    x_tf: &[f64],
    t_f: f64,
    nodes: &[NodeId],
    z: usize,
) -> Result<JumpTable, JumpError> {
    check_dims(a, abar, input, x_tf)?;
    if let Some(&bad) = nodes.iter().find(|&&p| p >= a.n()) {
        return Err(JumpError::NodeOutOfRange(bad));
    }
    let pa = MatrixPowers::new(a.matrix(), z);
    let pb = MatrixPowers::new(abar.matrix(), z);
    let x = DVector::from_column_slice(x_tf);
    let mut values = vec![Vec::with_capacity(z); nodes.len()];
    for k in 1..=z {
        let v = jump_from_powers(&pa, &pb, input, &x, t_f, k)?;
        for (row, &p) in values.iter_mut().zip(nodes) {
            row.push(v[p]);
        }
    }
    Ok(JumpTable::new(nodes.to_vec(), z, values))
}

/// Jump predicted from walk sums for a single failed edge `(j, i)`.
///
/// At `k = dist(j, p)` the jump is `Φ(Ω^{k−1}(i,p), A) · Σ_q (ā_iq − a_iq) x_q`;
/// below that it is zero. Larger `k` is rejected.
pub fn predict_jump_theorem1(
    dist: &DistanceTable,
    a: &InWeighting,
    abar: &InWeighting,
    x_tf: &[f64],
    edge: (NodeId, NodeId),
    p: NodeId,
    k: usize,
) -> Result<f64, JumpError> {
    let (j, i) = edge;
    let n = a.n();
    if abar.n() != n || x_tf.len() != n || dist.n() != n {
        return Err(JumpError::DimensionMismatch {
            expected: n,
            got: x_tf.len(),
        });
    }
    if p >= n {
        return Err(JumpError::NodeOutOfRange(p));
    }
    let limit = dist.get(j, p);
    match limit {
        Some(d) if k > d => return Err(JumpError::UncharacterizedOrder { k, limit: d }),
        Some(d) if k < d => return Ok(0.0),
        None => return Ok(0.0),
        _ => {}
    }
    if k == 0 {
        // dist(j, p) = 0 means p = j; the zeroth derivative never jumps.
        return Ok(0.0);
    }
    let walk_sum = crate::graph::phi_matrix(a, k - 1, i, p);
    Ok(walk_sum * perturbation_inner_product(a, abar, x_tf, i))
}

/// `Σ_q (ā_iq − a_iq) x_q`.
pub fn perturbation_inner_product(a: &InWeighting, abar: &InWeighting, x: &[f64], i: NodeId) -> f64 {
    (0..a.n()).map(|q| (abar.get(i, q) - a.get(i, q)) * x[q]).sum()
}

/// Structural first-jump order under the relation rules used for placement.
///
/// Unidirectional `(j, i)`: `dist(i,p)+1` when that equals `dist(j,p)` and is
/// at most `z`. Bidirectional: the larger endpoint distance when the two
/// differ by exactly one and it is at most `z`. A node failure behaves like
/// the union of its in-edges. Returns 0 when no jump is predicted.
pub fn first_jump_order(
    dist: &DistanceTable,
    kind: &FailureKind,
    p: NodeId,
    z: usize,
) -> Result<usize, JumpError> {
    if p >= dist.n() {
        return Err(JumpError::NodeOutOfRange(p));
    }
    let d = |v: NodeId| dist.get(v, p);
    let order = match *kind {
        FailureKind::Unidirectional((j, i)) => directed_relation(d(j), d(i)),
        FailureKind::Bidirectional((j, i)) => {
            directed_relation(d(j), d(i)).max(directed_relation(d(i), d(j)))
        }
        FailureKind::NodeIncoming(i) => (0..dist.n())
            .filter(|&j| j != i && dist.get(j, i) == Some(1))
            .map(|j| directed_relation(d(j), d(i)))
            .max()
            .unwrap_or(0),
    };
    Ok(if order <= z { order } else { 0 })
}

/// Order `k` with `tail at k` and `head at k−1`, else 0.
pub(crate) fn directed_relation(tail: Option<usize>, head: Option<usize>) -> usize {
    match (tail, head) {
        (Some(t), Some(h)) if t == h + 1 => t,
        _ => 0,
    }
}

/// `k`-th derivative of the state under `ẋ = M x + B w`, evaluated at `(t, x)`.
pub fn state_derivative(
    powers: &MatrixPowers,
    input: &InputSignal,
    x: &DVector<f64>,
    t: f64,
    k: usize,
) -> Result<DVector<f64>, JumpError> {
    let mut out = powers.get(k) * x;
    if k >= 1 && !input.is_zero() {
        for m in 0..k {
            out += powers.get(m) * input.forcing(k - 1 - m, t)?;
        }
    } else if k >= 1 && k - 1 > input.max_order() {
        return Err(SignalError::DerivativeUnavailable {
            order: k - 1,
            max: input.max_order(),
        }
        .into());
    }
    Ok(out)
}

/// One-sided derivative difference at the trajectory's failure sample.
///
/// Uses the closed-form derivative of each regime at the sampled state, so the
/// only error relative to [`oracle_jump`] comes from integrating `x(t_f)`.
pub fn numeric_jump_estimate(
    traj: &Trajectory,
    a: &InWeighting,
    abar: &InWeighting,
    input: &InputSignal,
    p: NodeId,
    k: usize,
) -> Result<f64, JumpError> {
    if k == 0 {
        return Err(JumpError::OrderTooLow);
    }
    let (t_f, x) = traj.failure_sample().ok_or(JumpError::NoFailureInstant)?;
    check_dims(a, abar, input, x.as_slice())?;
    if p >= a.n() {
        return Err(JumpError::NodeOutOfRange(p));
    }
    let before = state_derivative(&MatrixPowers::new(a.matrix(), k), input, x, t_f, k)?;
    let after = state_derivative(&MatrixPowers::new(abar.matrix(), k), input, x, t_f, k)?;
    Ok(after[p] - before[p])
}

/// One-sided jump table for `nodes` at the sampled state `x(t_f)`.
pub fn derivative_jump_table(
    a: &InWeighting,
    abar: &InWeighting,
    input: &InputSignal,
    x: &DVector<f64>,
    t_f: f64,
    nodes: &[NodeId],
    z: usize,
) -> Result<JumpTable, JumpError> {
    check_dims(a, abar, input, x.as_slice())?;
    let pa = MatrixPowers::new(a.matrix(), z);
    let pb = MatrixPowers::new(abar.matrix(), z);
    let mut values = vec![Vec::with_capacity(z); nodes.len()];
    for k in 1..=z {
        let d = state_derivative(&pb, input, x, t_f, k)? - state_derivative(&pa, input, x, t_f, k)?;
        for (row, &p) in values.iter_mut().zip(nodes) {
            row.push(d[p]);
        }
    }
    Ok(JumpTable::new(nodes.to_vec(), z, values))
}
