//! Simulates a consensus network through a link failure and writes the
//! trajectory as CSV to stdout.

use linkfdi::failure::FailureScenario;
use linkfdi::graph::{Digraph, InWeighting};
use linkfdi::signal::InputSignal;
use linkfdi::simulate::simulate;

fn main() {
    let g = Digraph::cycle(4).with_self_loops(0..4);
    let a = InWeighting::laplacian(&g).unwrap();
    let scenario = FailureScenario::unidirectional((1, 2), 0.25);
    let x0 = [1.0, 0.0, -1.0, 0.5];
    let traj = simulate(&g, &a, &InputSignal::zero(4), &x0, 0.0, Some(&scenario), 1.0, 0.05).unwrap();
    traj.write_csv(std::io::stdout()).unwrap();
    let (t, x) = traj.last().unwrap();
    eprintln!("state at t = {t}: {:.4?}", x.as_slice());
}
