//! Turning observed derivative jumps at sensor nodes into a verdict.
//!
//! Observations are compared against each class's generic first-jump
//! orders: the order at which a failure of that class makes a sensor jump for
//! generic weights and states. Wherever a class is related to a sensor the two
//! notions agree; elsewhere the generic order also accounts for jumps the
//! relation table leaves unassigned, so a real observation always has its
//! true class among the candidates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{InWeighting, NodeId};
use crate::jump::{derivative_jump_table, JumpError, JumpTable, SIMULATION_THRESHOLD};
use crate::relations::{EdgeClass, RelationIndex};
use crate::signal::InputSignal;
use crate::simulate::Trajectory;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosisError {
    #[error("observed signature matches no edge class")]
    InconsistentObservation,
    #[error("sensor {0} missing from the jump table")]
    MissingSensor(NodeId),
    #[error(transparent)]
    Jump(#[from] JumpError),
}

/// First jump order seen at each sensor (0 = none up to `z`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedSignature {
    pub entries: Vec<(NodeId, u32)>,
    pub t_f: Option<f64>,
}

impl ObservedSignature {
    pub fn is_silent(&self) -> bool {
        self.entries.iter().all(|&(_, k)| k == 0)
    }

    pub fn sensors(&self) -> Vec<NodeId> {
        self.entries.iter().map(|&(p, _)| p).collect()
    }
}

pub fn extract_signature(
    jumps: &JumpTable,
    sensors: &[NodeId],
    threshold: f64,
) -> Result<ObservedSignature, DiagnosisError> {
    let entries = sensors
        .iter()
        .map(|&p| {
            jumps
                .first_order_above(p, threshold)
                .map(|k| (p, k as u32))
                .ok_or(DiagnosisError::MissingSensor(p))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ObservedSignature { entries, t_f: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoFailure,
    Detected(Vec<usize>),
    Isolated(usize),
}

impl Verdict {
    pub fn candidates(&self) -> Vec<usize> {
        match self {
            Verdict::NoFailure => Vec::new(),
            Verdict::Detected(c) => c.clone(),
            Verdict::Isolated(c) => vec![*c],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::NoFailure => "no_failure",
            Verdict::Detected(_) => "detected",
            Verdict::Isolated(_) => "isolated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosis {
    pub verdict: Verdict,
    pub signature: ObservedSignature,
    /// Classes that would also produce a silent observation on these sensors.
    pub silent_classes: Vec<usize>,
}

fn expected<'a>(idx: &'a RelationIndex, sensors: &'a [NodeId], c: usize) -> impl Iterator<Item = u32> + 'a {
    sensors.iter().map(move |&p| idx.generic_order(p, c))
}

/// Classes whose expected first-jump orders equal the observation.
pub fn match_signature(idx: &RelationIndex, sig: &ObservedSignature) -> Result<Diagnosis, DiagnosisError> {
    let sensors = sig.sensors();
    let observed: Vec<u32> = sig.entries.iter().map(|&(_, k)| k).collect();
    let silent_classes: Vec<usize> = (0..idx.class_count())
        .filter(|&c| expected(idx, &sensors, c).all(|k| k == 0))
        .collect();
    if sig.is_silent() {
        return Ok(Diagnosis {
            verdict: Verdict::NoFailure,
            signature: sig.clone(),
            silent_classes,
        });
    }
    let candidates: Vec<usize> = (0..idx.class_count())
        .filter(|&c| expected(idx, &sensors, c).eq(observed.iter().copied()))
        .collect();
    let verdict = match candidates.len() {
        0 => return Err(DiagnosisError::InconsistentObservation),
        1 => Verdict::Isolated(candidates[0]),
        _ => Verdict::Detected(candidates),
    };
    Ok(Diagnosis {
        verdict,
        signature: sig.clone(),
        silent_classes,
    })
}

/// Plant models on either side of a suspected failure.
#[derive(Debug, Clone)]
pub struct RegimeModels<'a> {
    pub nominal: &'a InWeighting,
    pub faulty: &'a InWeighting,
    pub input: &'a InputSignal,
}

/// Scans a trajectory for a regime change and diagnoses it.
///
/// The derivative jumps at the switching sample are computed in closed form
/// from the two regimes at the sampled state. An event is emitted only when
/// some sensor actually jumps; a failure invisible to every sensor produces
/// no event.
pub fn monitor(
    traj: &Trajectory,
    sensors: &[NodeId],
    idx: &RelationIndex,
    models: &RegimeModels<'_>,
    threshold: f64,
) -> Result<Vec<Diagnosis>, DiagnosisError> {
    let Some((t_f, x)) = traj.failure_sample() else {
        return Ok(Vec::new());
    };
    let table = derivative_jump_table(
        models.nominal,
        models.faulty,
        models.input,
        x,
        t_f,
        sensors,
        idx.z(),
    )?;
    let mut sig = extract_signature(&table, sensors, threshold)?;
    if sig.is_silent() {
        return Ok(Vec::new());
    }
    sig.t_f = Some(t_f);
    Ok(vec![match_signature(idx, &sig)?])
}

/// [`monitor`] with the default simulation-side threshold.
pub fn monitor_default(
    traj: &Trajectory,
    sensors: &[NodeId],
    idx: &RelationIndex,
    models: &RegimeModels<'_>,
) -> Result<Vec<Diagnosis>, DiagnosisError> {
    monitor(traj, sensors, idx, models, SIMULATION_THRESHOLD)
}

/// Head nodes of the candidate classes, for agent-level diagnosis.
pub fn candidate_heads(idx: &RelationIndex, verdict: &Verdict) -> Vec<NodeId> {
    let mut heads: Vec<NodeId> = verdict
        .candidates()
        .into_iter()
        .flat_map(|c| idx.classes()[c].members.iter().map(|&(_, h)| h).collect::<Vec<_>>())
        .collect();
    heads.sort_unstable();
    heads.dedup();
    heads
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDoc {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub bidirectional: bool,
}

impl ClassDoc {
    pub fn from_class(c: &EdgeClass) -> Self {
        let (t, h) = c.representative();
        Self {
            id: c.id,
            tail: t + 1,
            head: h + 1,
            bidirectional: c.is_bidirectional(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureEntry {
    pub node: usize,
    pub order: u32,
}

/// One JSON line of the diagnosis event stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDoc {
    pub t_f: Option<f64>,
    pub verdict: String,
    pub candidates: Vec<ClassDoc>,
    pub signature: Vec<SignatureEntry>,
}

impl EventDoc {
    pub fn new(idx: &RelationIndex, d: &Diagnosis) -> Self {
        Self {
            t_f: d.signature.t_f,
            verdict: d.verdict.label().to_string(),
            candidates: d
                .verdict
                .candidates()
                .into_iter()
                .map(|c| ClassDoc::from_class(&idx.classes()[c]))
                .collect(),
            signature: d
                .signature
                .entries
                .iter()
                .map(|&(p, k)| SignatureEntry { node: p + 1, order: k })
                .collect(),
        }
    }
}
