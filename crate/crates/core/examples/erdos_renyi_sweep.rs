//! Sweeps the size of directed and undirected Erdos-Renyi graphs and prints
//! the mean detection-set size and derivative order per size.
//!
//! Pass an output directory to also write the raw and summary CSVs.

use std::fs::File;
use std::path::PathBuf;

use linkfdi::experiments::{run_sweep, SweepConfig};
use linkfdi::randgraphs::Family;

fn main() {
    let out_dir = std::env::args().nth(1).map(PathBuf::from);
    for directed in [true, false] {
        let cfg = SweepConfig {
            base: Family::ErdosRenyi { n: 20, p: 0.1, directed },
            param: "n".into(),
            values: vec![20.0, 40.0, 60.0],
            instances: 20,
            seed_base: 7,
            z: Default::default(),
            variant: Default::default(),
        };
        let res = run_sweep(&cfg).unwrap();
        let kind = if directed { "directed" } else { "undirected" };
        for s in res.summary() {
            println!(
                "{kind:>10} n = {:>3}: |M_D| {:.2} +- {:.2}, z {:.2}",
                s.param_value,
                s.mean("md_size").unwrap(),
                s.sd("md_size").unwrap(),
                s.mean("z").unwrap()
            );
        }
        if let Some(dir) = &out_dir {
            res.write_csv(File::create(dir.join(format!("er_{kind}.csv"))).unwrap()).unwrap();
            res.write_summary_csv(File::create(dir.join(format!("er_{kind}_summary.csv"))).unwrap()).unwrap();
        }
    }
}
