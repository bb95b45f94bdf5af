//! Exact derivative jumps caused by one edge failure, compared with the
//! closed-form walk-sum prediction at each node's distance.

use linkfdi::failure::{apply_failure, FailureScenario, PerturbationRule};
use linkfdi::graph::{all_pairs_distances, Digraph, InWeighting};
use linkfdi::jump::{oracle_jump_table, predict_jump_theorem1, ORACLE_THRESHOLD};
use linkfdi::signal::{InputSignal, Waveform};
use nalgebra::DMatrix;

fn main() {
    let g = Digraph::directed(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 4), (4, 0)]).unwrap();
    let weights = [(0, 1, 0.8), (1, 2, 1.2), (2, 3, -0.7), (3, 4, 1.1), (1, 4, 0.4), (4, 0, 0.9)];
    let a = InWeighting::from_edge_weights(&g, weights).unwrap();
    let failed = (0, 1);
    let scenario = FailureScenario::unidirectional(failed, 1.0).with_rule(PerturbationRule::ZeroOnly);
    let (_, abar) = apply_failure(&g, &a, &scenario).unwrap();

    let x = [1.0, -0.4, 0.3, 0.8, -1.1];
    let b = DMatrix::from_column_slice(5, 1, &[0.5, 0.0, 0.0, 0.0, -0.5]);
    let input = InputSignal::new(b, vec![Waveform::Sinusoid { amplitude: 1.0, omega: 2.0, phase: 0.3 }]).unwrap();

    let nodes: Vec<usize> = (0..5).collect();
    let z = 5;
    let table = oracle_jump_table(&a, &abar, &input, &x, 1.0, &nodes, z).unwrap();
    let dist = all_pairs_distances(&g);
    println!("edge {}->{} fails at t = 1", failed.0 + 1, failed.1 + 1);
    for p in nodes {
        let row: Vec<String> = (1..=z).map(|k| format!("{:>9.4}", table.get(p, k).unwrap())).collect();
        let first = table.first_order_above(p, ORACLE_THRESHOLD);
        print!("node {}: {}  first jump {:?}", p + 1, row.join(" "), first);
        if let Some(d) = dist.get(failed.0, p).filter(|&d| d > 0) {
            let predicted = predict_jump_theorem1(&dist, &a, &abar, &x, failed, p, d).unwrap();
            print!("  predicted at order {d}: {predicted:.4}");
        }
        println!();
    }
}
