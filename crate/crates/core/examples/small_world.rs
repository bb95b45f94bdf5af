//! Watts-Strogatz graphs: detection-set size against the rewiring
//! probability, and required derivative order against the degree.

use linkfdi::experiments::{run_sweep, SweepConfig};
use linkfdi::randgraphs::Family;

fn sweep(base: Family, param: &str, values: Vec<f64>) -> Vec<(f64, f64, f64)> {
    let cfg = SweepConfig {
        base,
        param: param.into(),
        values,
        instances: 30,
        seed_base: 11,
        z: Default::default(),
        variant: Default::default(),
    };
    run_sweep(&cfg)
        .unwrap()
        .summary()
        .iter()
        .map(|s| (s.param_value, s.mean("md_size").unwrap(), s.mean("z").unwrap()))
        .collect()
}

fn main() {
    println!("n = 50, d = 4");
    for (p, md, z) in sweep(Family::SmallWorld { n: 50, d: 4, rewire_p: 0.1 }, "rewire_p", vec![0.1, 0.2, 0.3, 0.4, 0.5]) {
        println!("  rewire_p {p:.1}: |M_D| {md:.2}, z {z:.2}");
    }
    println!("n = 50, rewire_p = 0.21");
    for (d, md, z) in sweep(Family::SmallWorld { n: 50, d: 2, rewire_p: 0.21 }, "d", vec![2.0, 4.0, 6.0, 8.0]) {
        println!("  d {d}: |M_D| {md:.2}, z {z:.2}");
    }
}
