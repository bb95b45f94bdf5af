//! Prints the relation table of a path graph: which derivative order each
//! node sees for each edge.

use linkfdi::graph::Digraph;
use linkfdi::relations::RelationIndex;

fn main() {
    let g = Digraph::path(5);
    let idx = RelationIndex::with_default_z(&g);
    let mut out = Vec::new();
    idx.write_csv(&mut out).unwrap();
    print!("{}", String::from_utf8(out).unwrap());

    let sink = [4];
    for c in idx.classes() {
        let (t, h) = c.representative();
        println!("edge {}->{} seen at node 5 with signature {:?}", t + 1, h + 1, idx.signature(&sink, c.id).entries);
    }
    println!("undetected from node 5: {}, unresolved: {}", idx.f_d(&sink), idx.f_i(&sink));
}
