//! Places isolation sensors, simulates every possible single-edge failure
//! and diagnoses each from the simulated sensor trajectories.

use linkfdi::diagnosis::{monitor, RegimeModels, Verdict};
use linkfdi::failure::{apply_failure, FailureScenario, PerturbationRule};
use linkfdi::graph::{Digraph, InWeighting};
use linkfdi::jump::SIMULATION_THRESHOLD;
use linkfdi::placement::{greedy_detection, greedy_isolation};
use linkfdi::relations::RelationIndex;
use linkfdi::signal::InputSignal;
use linkfdi::simulate::simulate;

fn main() {
    let g = Digraph::directed(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (4, 1)]).unwrap();
    let a = InWeighting::unit(&g);
    let idx = RelationIndex::with_default_z(&g);
    let md = greedy_detection(&idx).expect("detectable");
    let isolation = greedy_isolation(&idx, &md);
    if !isolation.is_isolated() {
        println!("{} classes stay ambiguous even with every node observed", isolation.residual());
    }
    let sensors = isolation.sensors().map_or_else(|| (0..g.n()).collect(), |s| s.sensors.clone());
    println!("sensors {:?}", sensors.iter().map(|v| v + 1).collect::<Vec<_>>());

    let input = InputSignal::zero(g.n());
    let x0 = [1.0, -0.6, 0.3, 0.9, -0.2];
    for class in idx.classes() {
        let (t, h) = class.representative();
        let scenario = FailureScenario::unidirectional((t, h), 0.5).with_rule(PerturbationRule::ZeroOnly);
        let (_, abar) = apply_failure(&g, &a, &scenario).unwrap();
        let traj = simulate(&g, &a, &input, &x0, 0.0, Some(&scenario), 1.0, 1e-3).unwrap();
        let models = RegimeModels { nominal: &a, faulty: &abar, input: &input };
        let events = monitor(&traj, &sensors, &idx, &models, SIMULATION_THRESHOLD).unwrap();
        let verdict = events.first().map(|d| d.verdict.clone()).unwrap_or(Verdict::NoFailure);
        let named: Vec<String> = verdict
            .candidates()
            .iter()
            .map(|&c| {
                let (t, h) = idx.classes()[c].representative();
                format!("{}->{}", t + 1, h + 1)
            })
            .collect();
        println!("failed {}->{}: {} {:?}", t + 1, h + 1, verdict.label(), named);
    }
}
