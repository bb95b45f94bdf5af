//! Detection and isolation of link failures in networks of single
//! integrators `ẋ = A x + B w`.
//!
//! A failing link makes the output derivatives of downstream nodes jump at
//! orders fixed by hop distances. This crate predicts those jump fingerprints,
//! places sensors greedily so every failure is detected or told apart,
//! simulates failures and diagnoses them from observed jumps.
//!
//! ```
//! use linkfdi::graph::Digraph;
//! use linkfdi::placement::greedy_detection;
//! use linkfdi::relations::RelationIndex;
//!
//! let g = Digraph::path(4);
//! let idx = RelationIndex::with_default_z(&g);
//! let sensors = greedy_detection(&idx).unwrap();
//! assert_eq!(sensors.sensors, vec![3]);
//! ```

pub mod cli;
pub mod diagnosis;
pub mod edgelist;
pub mod experiments;
pub mod failure;
pub mod graph;
pub mod jump;
pub mod placement;
pub mod randgraphs;
pub mod relations;
pub mod signal;
pub mod simulate;

pub use diagnosis::{match_signature, monitor, Diagnosis, ObservedSignature, Verdict};
pub use failure::{apply_failure, FailureKind, FailureScenario, PerturbationRule};
pub use graph::{all_pairs_distances, diameter, Digraph, DistanceTable, Edge, InWeighting, NodeId};
pub use jump::{oracle_jump, oracle_jump_table, JumpTable};
pub use placement::{greedy_detection, greedy_isolation, IsolationOutcome, SensorSet};
pub use relations::{EdgeClass, RelationIndex};
pub use signal::{InputSignal, Waveform};
pub use simulate::{simulate, Trajectory};
