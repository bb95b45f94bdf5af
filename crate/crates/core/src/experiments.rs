//! Parameter sweeps over random graph families and the geometric
//! three-treatment demonstration.
//!
//! Placement depends on structure only, so sweeps never draw weights.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{all_pairs_distances, diameter_of, Digraph};
use crate::placement::{greedy_detection, greedy_isolation, IsolationOutcome, SensorSet};
use crate::randgraphs::{
    erdos_renyi_graph, geometric_with_edge_count, random_geometric_graph, random_orientation,
    watts_strogatz_graph, Family, GenError,
};
use crate::relations::RelationIndex;

/// First line of every sweep CSV.
pub const SCHEMA_TAG: &str = "# schema: linkfdi-sweep/1";
/// First line of every sweep summary CSV.
pub const SUMMARY_SCHEMA_TAG: &str = "# schema: linkfdi-sweep-summary/1";

pub const DEFAULT_INSTANCES: usize = 50;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("sweep needs at least one instance")]
    NoInstances,
    #[error("swept values must be non-empty and strictly increasing")]
    Values,
    #[error("parameter `{param}` does not apply to this family")]
    UnknownParam { param: String },
    #[error("parameter `{param}` needs a non-negative integer, got {value}")]
    NotInteger { param: String, value: f64 },
    #[error("variant `{0}` needs an undirected family")]
    Variant(&'static str),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZPolicy {
    /// Largest finite distance plus one, per instance.
    #[default]
    DiameterPlusOne,
    Fixed(usize),
}

impl ZPolicy {
    pub fn resolve(self, diameter: usize) -> usize {
        match self {
            ZPolicy::DiameterPlusOne => diameter + 1,
            ZPolicy::Fixed(z) => z,
        }
    }
}

/// Transformation applied to each generated graph before placement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    AsGenerated,
    /// Every undirected link becomes two independent arcs.
    UnidirectionalPairs,
    /// Every undirected link keeps one random orientation.
    Oriented,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Family with the non-swept parameters fixed.
    pub base: Family,
    pub param: String,
    pub values: Vec<f64>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default)]
    pub z: ZPolicy,
    #[serde(default)]
    pub variant: Variant,
}

fn default_instances() -> usize {
    DEFAULT_INSTANCES
}

fn integer(param: &str, value: f64) -> Result<usize, ExperimentError> {
    if value >= 0.0 && value.fract() == 0.0 {
        Ok(value as usize)
    } else {
        Err(ExperimentError::NotInteger {
            param: param.to_string(),
            value,
        })
    }
}

/// `base` with the named parameter replaced.
pub fn with_param(base: Family, param: &str, value: f64) -> Result<Family, ExperimentError> {
    let unknown = || ExperimentError::UnknownParam {
        param: param.to_string(),
    };
    let mut f = base;
    match (&mut f, param) {
        (Family::ErdosRenyi { n, .. }, "n")
        | (Family::Geometric { n, .. }, "n")
        | (Family::SmallWorld { n, .. }, "n") => *n = integer(param, value)?,
        (Family::ErdosRenyi { p, .. }, "p") => *p = value,
        (Family::Geometric { radius, .. }, "radius") => *radius = value,
        (Family::Geometric { side, .. }, "side") => *side = value,
        (Family::SmallWorld { d, .. }, "d") => *d = integer(param, value)?,
        (Family::SmallWorld { rewire_p, .. }, "rewire_p" | "p") => *rewire_p = value,
        _ => return Err(unknown()),
    }
    Ok(f)
}

fn family_name(f: &Family) -> &'static str {
    match f {
        Family::ErdosRenyi { .. } => "erdos_renyi",
        Family::Geometric { .. } => "geometric",
        Family::SmallWorld { .. } => "small_world",
    }
}

fn variant_name(f: &Family, v: Variant) -> &'static str {
    match (f, v) {
        (Family::ErdosRenyi { directed: true, .. }, _) => "directed",
        (_, Variant::AsGenerated) => "undirected",
        (_, Variant::UnidirectionalPairs) => "unidirectional_pairs",
        (_, Variant::Oriented) => "oriented",
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.instances == 0 {
            return Err(ExperimentError::NoInstances);
        }
        if self.values.is_empty() || self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::Values);
        }
        for &v in &self.values {
            with_param(self.base, &self.param, v)?;
        }
        if let Family::ErdosRenyi { directed: true, .. } = self.base {
            match self.variant {
                Variant::AsGenerated => {}
                Variant::UnidirectionalPairs => return Err(ExperimentError::Variant("unidirectional_pairs")),
                Variant::Oriented => return Err(ExperimentError::Variant("oriented")),
            }
        }
        Ok(())
    }
}

/// Structure-only instance of a family.
pub fn generate_structure(f: &Family, seed: u64) -> Result<Digraph, GenError> {
    match *f {
        Family::ErdosRenyi { n, p, directed } => erdos_renyi_graph(n, p, directed, seed),
        Family::Geometric { n, radius, side } => random_geometric_graph(n, radius, side, seed),
        Family::SmallWorld { n, d, rewire_p } => watts_strogatz_graph(n, d, rewire_p, seed),
    }
}

pub fn apply_variant(g: &Digraph, v: Variant, seed: u64) -> Result<Digraph, GenError> {
    match v {
        Variant::AsGenerated => Ok(g.clone()),
        Variant::UnidirectionalPairs => Ok(g.as_unidirectional()),
        Variant::Oriented => random_orientation(g, seed),
    }
}

/// Placement statistics for one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub n: usize,
    pub edges: usize,
    pub classes: usize,
    pub diameter: usize,
    pub has_unreachable_pairs: bool,
    pub z: usize,
    pub feasible: bool,
    pub md_size: usize,
    pub mi_size: usize,
    pub isolation_feasible: bool,
    pub fi_residual_md: usize,
    pub fi_residual_mi: usize,
    pub fi_residual_all: usize,
}

pub fn analyze(g: &Digraph, z: ZPolicy) -> InstanceStats {
    let dist = all_pairs_distances(g);
    let diam = diameter_of(&dist);
    let z = z.resolve(diam.value).max(1);
    let idx = RelationIndex::from_distances(g, &dist, z).expect("z is positive");
    let detection = greedy_detection(&idx);
    let seed = detection.clone().unwrap_or(SensorSet {
        sensors: Vec::new(),
        residuals: Vec::new(),
    });
    let isolation = greedy_isolation(&idx, &seed);
    let mi = match &isolation {
        IsolationOutcome::Isolated(s) => s,
        IsolationOutcome::Empty { best_effort, .. } => best_effort,
    };
    let all: Vec<usize> = (0..g.n()).collect();
    InstanceStats {
        n: g.n(),
        edges: g.edges().filter(|&(t, h)| t != h).count(),
        classes: idx.class_count(),
        diameter: diam.value,
        has_unreachable_pairs: diam.has_unreachable_pairs,
        z,
        feasible: detection.is_ok(),
        md_size: seed.len(),
        mi_size: mi.len(),
        isolation_feasible: isolation.is_isolated(),
        fi_residual_md: idx.f_i(&seed.sensors),
        fi_residual_mi: isolation.residual(),
        fi_residual_all: idx.f_i(&all),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub variant: String,
    pub param_name: String,
    pub param_value: f64,
    pub instance: usize,
    pub seed: u64,
    pub stats: InstanceStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResults {
    pub rows: Vec<SweepRow>,
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResults, ExperimentError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.values.len())
        .flat_map(|v| (0..cfg.instances).map(move |i| (v, i)))
        .collect();
    let mut rows = jobs
        .into_par_iter()
        .map(|(vi, i)| {
            let value = cfg.values[vi];
            let family = with_param(cfg.base, &cfg.param, value)?;
            let seed = cfg.seed_base.wrapping_add(i as u64);
            let g = apply_variant(&generate_structure(&family, seed)?, cfg.variant, seed)?;
            Ok(((vi, i), SweepRow {
                family: family_name(&family).to_string(),
                variant: variant_name(&family, cfg.variant).to_string(),
                param_name: cfg.param.clone(),
                param_value: value,
                instance: i,
                seed,
                stats: analyze(&g, cfg.z),
            }))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    rows.sort_by_key(|(k, _)| *k);
    Ok(SweepResults {
        rows: rows.into_iter().map(|(_, r)| r).collect(),
    })
}

const COLUMNS: [&str; 16] = [
    "family",
    "param_name",
    "param_value",
    "instance",
    "seed",
    "n",
    "edges",
    "diameter",
    "z",
    "md_size",
    "mi_size",
    "fi_residual_mi",
    "fi_residual_all",
    "feasible",
    "fi_residual_md",
    "variant",
];

/// Summary statistics, one block of columns per metric.
const METRICS: [&str; 7] = [
    "md_size",
    "mi_size",
    "diameter",
    "z",
    "fi_residual_md",
    "fi_residual_mi",
    "fi_residual_all",
];

fn metric(s: &InstanceStats, name: &str) -> f64 {
    (match name {
        "md_size" => s.md_size,
        "mi_size" => s.mi_size,
        "diameter" => s.diameter,
        "z" => s.z,
        "fi_residual_md" => s.fi_residual_md,
        "fi_residual_mi" => s.fi_residual_mi,
        "fi_residual_all" => s.fi_residual_all,
        _ => unreachable!("unknown metric {name}"),
    }) as f64
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub family: String,
    pub variant: String,
    pub param_name: String,
    pub param_value: f64,
    pub instances: usize,
    pub feasible_fraction: f64,
    /// `(metric, mean, sd)` in [`METRICS`] order.
    pub stats: Vec<(&'static str, f64, f64)>,
}

impl SummaryRow {
    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.stats.iter().find(|s| s.0 == metric).map(|s| s.1)
    }

    pub fn sd(&self, metric: &str) -> Option<f64> {
        self.stats.iter().find(|s| s.0 == metric).map(|s| s.2)
    }
}

impl SweepResults {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), ExperimentError> {
        writeln!(out, "{SCHEMA_TAG}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS)?;
        for r in &self.rows {
            let s = &r.stats;
            w.write_record([
                r.family.clone(),
                r.param_name.clone(),
                r.param_value.to_string(),
                r.instance.to_string(),
                r.seed.to_string(),
                s.n.to_string(),
                s.edges.to_string(),
                s.diameter.to_string(),
                s.z.to_string(),
                s.md_size.to_string(),
                s.mi_size.to_string(),
                s.fi_residual_mi.to_string(),
                s.fi_residual_all.to_string(),
                u8::from(s.feasible).to_string(),
                s.fi_residual_md.to_string(),
                r.variant.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = Vec::new();
        let mut start = 0;
        while start < self.rows.len() {
            let first = &self.rows[start];
            let end = start
                + self.rows[start..]
                    .iter()
                    .take_while(|r| r.param_value == first.param_value)
                    .count();
            let group = &self.rows[start..end];
            let stats = METRICS
                .iter()
                .map(|&m| {
                    let xs: Vec<f64> = group.iter().map(|r| metric(&r.stats, m)).collect();
                    let (mean, sd) = mean_sd(&xs);
                    (m, mean, sd)
                })
                .collect();
            out.push(SummaryRow {
                family: first.family.clone(),
                variant: first.variant.clone(),
                param_name: first.param_name.clone(),
                param_value: first.param_value,
                instances: group.len(),
                feasible_fraction: group.iter().filter(|r| r.stats.feasible).count() as f64
                    / group.len() as f64,
                stats,
            });
            start = end;
        }
        out
    }

    /// One row per `(value, statistic)` with `statistic` in `{mean, sd}`.
    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> Result<(), ExperimentError> {
        writeln!(out, "{SUMMARY_SCHEMA_TAG}")?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["family", "variant", "param_name", "param_value", "statistic", "instances"];
        header.extend(METRICS);
        header.push("feasible_fraction");
        w.write_record(&header)?;
        for s in self.summary() {
            for (label, pick) in [("mean", 1usize), ("sd", 2)] {
                let mut rec = vec![
                    s.family.clone(),
                    s.variant.clone(),
                    s.param_name.clone(),
                    s.param_value.to_string(),
                    label.to_string(),
                    s.instances.to_string(),
                ];
                rec.extend(s.stats.iter().map(|&(_, m, sd)| if pick == 1 { m } else { sd }.to_string()));
                rec.push(if pick == 1 { s.feasible_fraction.to_string() } else { String::new() });
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// One treatment of the geometric demonstration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Treatment {
    pub name: String,
    pub stats: InstanceStats,
    /// Classes told apart by the detection set alone.
    pub isolated_with_md: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub seed: u64,
    pub n: usize,
    pub undirected_edges: usize,
    pub radius: f64,
    pub treatments: Vec<Treatment>,
}

impl DemoReport {
    pub fn treatment(&self, name: &str) -> Option<&Treatment> {
        self.treatments.iter().find(|t| t.name == name)
    }

    /// Fixed-width side-by-side table.
    pub fn table(&self) -> String {
        let mut s = format!(
            "geometric instance: n = {}, {} undirected links, radius {:.4}, seed {}\n",
            self.n, self.undirected_edges, self.radius, self.seed
        );
        s.push_str(&format!(
            "{:<22}{:>8}{:>6}{:>6}{:>10}{:>10}{:>12}{:>10}\n",
            "treatment", "classes", "z", "|M_D|", "iso(M_D)", "|M_I|", "f_I(M_I)", "f_I(V)"
        ));
        for t in &self.treatments {
            let st = &t.stats;
            s.push_str(&format!(
                "{:<22}{:>8}{:>6}{:>6}{:>10}{:>10}{:>12}{:>10}\n",
                t.name, st.classes, st.z, st.md_size, t.isolated_with_md, st.mi_size, st.fi_residual_mi, st.fi_residual_all
            ));
        }
        s
    }
}

pub const DEMO_NODES: usize = 50;
pub const DEMO_EDGES: usize = 200;

/// One 50-node, 200-link geometric instance under three treatments: all
/// links bidirectional, every link as two independent arcs, and every link
/// randomly oriented.
pub fn demo_geometric(seed: u64) -> Result<DemoReport, ExperimentError> {
    let (g, radius) = geometric_with_edge_count(DEMO_NODES, DEMO_EDGES, 1.0, seed)?;
    let treatments = [
        ("bidirectional", Variant::AsGenerated),
        ("unidirectional_pairs", Variant::UnidirectionalPairs),
        ("oriented", Variant::Oriented),
    ]
    .into_iter()
    .map(|(name, v)| {
        let h = apply_variant(&g, v, seed)?;
        let stats = analyze(&h, ZPolicy::DiameterPlusOne);
        Ok(Treatment {
            name: name.to_string(),
            isolated_with_md: stats.classes - stats.fi_residual_md,
            stats,
        })
    })
    .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(DemoReport {
        seed,
        n: DEMO_NODES,
        undirected_edges: DEMO_EDGES,
        radius,
        treatments,
    })
}
