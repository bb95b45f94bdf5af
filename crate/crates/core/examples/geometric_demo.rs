//! One random geometric network read three ways: as undirected links, as
//! pairs of independent arcs, and with each link randomly oriented.

use linkfdi::experiments::demo_geometric;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let report = demo_geometric(seed).unwrap();
    print!("{}", report.table());
}
