//! Detection and isolation sensor sets for a small mixed graph.
//!
//! Run with `cargo run --example place_sensors`.

use linkfdi::edgelist;
use linkfdi::placement::{greedy_detection, greedy_isolation, IsolationOutcome, PlacementDoc};
use linkfdi::relations::RelationIndex;

const GRAPH: &str = "\
# a directed ring with one undirected chord
n 6
1 2 1.0
2 3 1.0
3 4 1.0
4 5 1.0
5 6 1.0
6 1 1.0
2 5 0.5 b
5 2 0.5 b
";

fn main() {
    let (g, _a) = edgelist::parse(GRAPH).expect("valid edge list");
    let idx = RelationIndex::with_default_z(&g);
    println!("{} edge classes, z = {}", idx.class_count(), idx.z());

    let detection = greedy_detection(&idx);
    let Ok(md) = &detection else {
        println!("detection is infeasible at this z");
        return;
    };
    let labels = |s: &[usize]| s.iter().map(|v| v + 1).collect::<Vec<_>>();
    println!("detection sensors {:?}, undetected after each pick {:?}", labels(&md.sensors), md.residuals);

    let isolation = greedy_isolation(&idx, md);
    match &isolation {
        IsolationOutcome::Isolated(mi) => println!("isolation sensors {:?}", labels(&mi.sensors)),
        IsolationOutcome::Empty { residual, .. } => {
            println!("isolation impossible: {residual} classes share a fingerprint even with every node observed")
        }
    }

    let edges = g.edges().filter(|&(t, h)| t != h).count();
    let doc = PlacementDoc::new(&idx, &detection, Some(&isolation), edges);
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
}
