//! Command-line front end. `run` parses arguments, executes one subcommand and
//! returns the process exit status.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagnosis::{monitor, EventDoc, RegimeModels};
use crate::edgelist;
use crate::experiments::{demo_geometric, run_sweep, SweepConfig};
use crate::failure::{apply_failure, FailureScenario};
use crate::graph::{all_pairs_distances, check_assumption1, Digraph, InWeighting, NodeId};
use crate::jump::SIMULATION_THRESHOLD;
use crate::placement::{greedy_detection, greedy_isolation, PlacementDoc, SensorSet};
use crate::relations::{default_z, RelationIndex};
use crate::signal::{InputDoc, InputSignal};
use crate::simulate::{simulate, Trajectory, DEFAULT_STEP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    Input { path: String, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_INPUT,
        }
    }
}

fn input_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

#[derive(Debug, Parser)]
#[command(name = "linkfdi", version, about = "Link-failure detection and isolation for integrator networks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for anything random (initial states, generated instances).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Highest derivative order observed; defaults to diameter + 1.
    #[arg(long, global = true)]
    pub z: Option<usize>,
    /// Tolerance: jump threshold for `diagnose`, walk-sum tolerance for `place`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Choose detection (and optionally isolation) sensors for a graph.
    Place {
        graph: PathBuf,
        /// Also run greedy isolation seeded with the detection set.
        #[arg(long)]
        isolation: bool,
        /// Write the relation table as CSV to this path.
        #[arg(long)]
        relations: Option<PathBuf>,
    },
    /// Simulate the network through a failure and write the trajectory CSV.
    Simulate {
        graph: PathBuf,
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Input document `{"b": [[..]], "components": [..]}`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Initial state, comma separated; random in [-1, 1] when omitted.
        #[arg(long, value_delimiter = ',')]
        x0: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
    },
    /// Diagnose a trajectory from the derivative jumps seen at the sensors.
    Diagnose {
        graph: PathBuf,
        /// Sensor labels (comma separated) or a placement JSON file.
        #[arg(long)]
        sensors: String,
        #[arg(long)]
        trajectory: PathBuf,
        /// Scenario describing the post-failure plant.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run a parameter sweep from a JSON config and write the results CSV.
    Sweep {
        config: PathBuf,
        /// Also write per-value mean and standard deviation here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Compare the three treatments of one random geometric instance.
    DemoGeometric {
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input_err(path, e))
}

fn load_graph(path: &Path) -> Result<(Digraph, InWeighting), CliError> {
    edgelist::parse(&read(path)?).map_err(|e| input_err(path, e))
}

fn load_scenario(path: &Path) -> Result<FailureScenario, CliError> {
    FailureScenario::from_json(&read(path)?).map_err(|e| input_err(path, e))
}

fn load_input(path: Option<&Path>, n: usize) -> Result<InputSignal, CliError> {
    let Some(path) = path else {
        return Ok(InputSignal::zero(n));
    };
    let doc: InputDoc = serde_json::from_str(&read(path)?).map_err(|e| input_err(path, e))?;
    doc.into_signal(n).map_err(|e| input_err(path, e))
}

fn parse_labels(text: &str, n: usize) -> Result<Vec<NodeId>, CliError> {
    text.split(',')
        .map(|s| {
            let label: usize = s
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad sensor label `{s}`")))?;
            if label == 0 || label > n {
                return Err(CliError::Usage(format!("sensor {label} outside 1..={n}")));
            }
            Ok(label - 1)
        })
        .collect()
}

fn load_sensors(arg: &str, n: usize) -> Result<Vec<NodeId>, CliError> {
    let path = Path::new(arg);
    if !path.is_file() {
        return parse_labels(arg, n);
    }
    let doc: PlacementDoc = serde_json::from_str(&read(path)?).map_err(|e| input_err(path, e))?;
    let labels = doc.isolation.map_or(doc.sensors, |iso| iso.sensors);
    labels
        .into_iter()
        .map(|l| match l {
            1.. if l <= n => Ok(l - 1),
            _ => Err(input_err(path, format!("sensor {l} outside 1..={n}"))),
        })
        .collect()
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| input_err(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn relation_index(g: &Digraph, z: Option<usize>) -> Result<RelationIndex, CliError> {
    let dist = all_pairs_distances(g);
    let z = z.unwrap_or_else(|| default_z(&dist));
    RelationIndex::from_distances(g, &dist, z).map_err(|e| CliError::Usage(e.to_string()))
}

fn place(
    global: &GlobalOpts,
    graph: &Path,
    isolation: bool,
    relations: Option<&Path>,
) -> Result<(), CliError> {
    let (g, a) = load_graph(graph)?;
    let tol = global.tol.unwrap_or(crate::graph::DEFAULT_TOL);
    let violations = check_assumption1(&g, &a, tol);
    if !violations.is_empty() {
        eprintln!(
            "warning: {} node pairs have cancelling shortest-walk weights (first: {} -> {})",
            violations.len(),
            violations[0].0 + 1,
            violations[0].1 + 1
        );
    }
    let idx = relation_index(&g, global.z)?;
    if let Some(path) = relations {
        let file = fs::File::create(path).map_err(|e| input_err(path, e))?;
        idx.write_csv(file).map_err(|e| input_err(path, e))?;
    }
    let detection = greedy_detection(&idx);
    let iso = isolation.then(|| {
        let seed = detection.clone().unwrap_or(SensorSet {
            sensors: Vec::new(),
            residuals: Vec::new(),
        });
        greedy_isolation(&idx, &seed)
    });
    let doc = PlacementDoc::new(&idx, &detection, iso.as_ref(), g.edges().filter(|&(t, h)| t != h).count());
    let mut text = serde_json::to_string_pretty(&doc).expect("placement serializes");
    text.push('\n');
    emit(global.out.as_deref(), text.as_bytes())?;
    match detection {
        Ok(_) => Ok(()),
        Err(inf) => Err(CliError::Infeasible(format!(
            "{} edge classes cannot be detected with z = {}",
            inf.undetectable.len(),
            idx.z()
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    global: &GlobalOpts,
    graph: &Path,
    scenario: Option<&Path>,
    input: Option<&Path>,
    x0: Option<Vec<f64>>,
    t0: f64,
    t_end: f64,
    step: f64,
) -> Result<(), CliError> {
    let (g, a) = load_graph(graph)?;
    let scenario = scenario.map(load_scenario).transpose()?;
    let input = load_input(input, g.n())?;
    let x0 = x0.unwrap_or_else(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(global.seed.unwrap_or(0));
        (0..g.n()).map(|_| rng.random_range(-1.0..=1.0)).collect()
    });
    let traj = simulate(&g, &a, &input, &x0, t0, scenario.as_ref(), t_end, step)
        .map_err(|e| input_err(graph, e))?;
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).map_err(|e| input_err(graph, e))?;
    emit(global.out.as_deref(), &buf)
}

fn diagnose(
    global: &GlobalOpts,
    graph: &Path,
    sensors: &str,
    trajectory: &Path,
    scenario: Option<&Path>,
    input: Option<&Path>,
) -> Result<(), CliError> {
    let (g, a) = load_graph(graph)?;
    let sensors = load_sensors(sensors, g.n())?;
    let traj = Trajectory::read_csv(fs::File::open(trajectory).map_err(|e| input_err(trajectory, e))?)
        .map_err(|e| input_err(trajectory, e))?;
    let input = load_input(input, g.n())?;
    let faulty = match (scenario, traj.failure_index()) {
        (Some(path), _) => {
            let s = load_scenario(path)?;
            apply_failure(&g, &a, &s).map_err(|e| input_err(path, e))?.1
        }
        (None, None) => a.clone(),
        (None, Some(_)) => {
            return Err(CliError::Usage(
                "trajectory contains a failure; pass --scenario for the post-failure plant".into(),
            ))
        }
    };
    let idx = relation_index(&g, global.z)?;
    let models = RegimeModels {
        nominal: &a,
        faulty: &faulty,
        input: &input,
    };
    let events = monitor(&traj, &sensors, &idx, &models, global.tol.unwrap_or(SIMULATION_THRESHOLD))
        .map_err(|e| input_err(trajectory, e))?;
    let mut text = String::new();
    for d in &events {
        text.push_str(&serde_json::to_string(&EventDoc::new(&idx, d)).expect("event serializes"));
        text.push('\n');
    }
    emit(global.out.as_deref(), text.as_bytes())
}

fn sweep(global: &GlobalOpts, config: &Path, summary: Option<&Path>) -> Result<(), CliError> {
    let mut cfg: SweepConfig = serde_json::from_str(&read(config)?).map_err(|e| input_err(config, e))?;
    if let Some(seed) = global.seed {
        cfg.seed_base = seed;
    }
    if let Some(z) = global.z {
        cfg.z = crate::experiments::ZPolicy::Fixed(z);
    }
    let res = run_sweep(&cfg).map_err(|e| input_err(config, e))?;
    let mut buf = Vec::new();
    res.write_csv(&mut buf).map_err(|e| input_err(config, e))?;
    emit(global.out.as_deref(), &buf)?;
    if let Some(path) = summary {
        let mut buf = Vec::new();
        res.write_summary_csv(&mut buf).map_err(|e| input_err(path, e))?;
        fs::write(path, buf).map_err(|e| input_err(path, e))?;
    }
    Ok(())
}

fn demo(global: &GlobalOpts, json: bool) -> Result<(), CliError> {
    let report = demo_geometric(global.seed.unwrap_or(0)).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = if json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        report.table()
    };
    emit(global.out.as_deref(), text.as_bytes())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Place {
            graph,
            isolation,
            relations,
        } => place(g, &graph, isolation, relations.as_deref()),
        Command::Simulate {
            graph,
            scenario,
            input,
            x0,
            t0,
            t_end,
            step,
        } => simulate_cmd(g, &graph, scenario.as_deref(), input.as_deref(), x0, t0, t_end, step),
        Command::Diagnose {
            graph,
            sensors,
            trajectory,
            scenario,
            input,
        } => diagnose(g, &graph, &sensors, &trajectory, scenario.as_deref(), input.as_deref()),
        Command::Sweep { config, summary } => sweep(g, &config, summary.as_deref()),
        Command::DemoGeometric { json } => demo(g, json),
    }
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
