//! Node–edge relations, edge classes, signatures and the set functions
//! `f_D` and `f_I` that sensor placement minimizes.
//!
//! Edges are grouped into classes: a bidirectional pair forms one class,
//! every other non-loop edge is its own class, and self-loops are dropped.
//! For each node `p` and class, the relation order is the derivative order
//! `k in 1..=z` at which `p` sees the class fail, or 0 when it does not:
//!
//! * unidirectional `(q, r)`: `k` iff `dist(q,p) = k` and `dist(r,p) = k−1`;
//! * bidirectional: `k` iff either orientation satisfies that clause.
//!
//! A signature over a sensor set is the vector of relation orders on it. Two
//! classes are told apart iff their vectors differ; comparing a class against
//! every other class is the same as comparing it against every edge outside
//! it, since members of a class share one vector.

use std::collections::HashMap;
use std::io::Write;

use thiserror::Error;

use crate::graph::{all_pairs_distances, diameter_of, Digraph, DistanceTable, Edge, NodeId};
use crate::jump::directed_relation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelationError {
    #[error("z must be at least 1")]
    ZeroOrder,
    #[error("order table has {got} entries, expected {expected}")]
    TableShape { expected: usize, got: usize },
    #[error("order {order} exceeds z = {z}")]
    OrderAboveZ { order: u32, z: u32 },
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
}

/// One failure unit: a single edge, or a bidirectional pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeClass {
    pub id: usize,
    /// Representative first; for a pair the orientation with the smaller tail.
    pub members: Vec<Edge>,
}

impl EdgeClass {
    pub fn representative(&self) -> Edge {
        self.members[0]
    }

    pub fn is_bidirectional(&self) -> bool {
        self.members.len() == 2
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.members.contains(&e)
    }
}

/// Quotient of the non-loop edges by the bidirectional pairing.
pub fn build_classes(g: &Digraph) -> Vec<EdgeClass> {
    let mut classes = Vec::new();
    for (t, h) in g.edges() {
        if t == h {
            continue;
        }
        let members = if g.is_bidirectional((t, h)) {
            if t > h {
                continue;
            }
            vec![(t, h), (h, t)]
        } else {
            vec![(t, h)]
        };
        classes.push(EdgeClass {
            id: classes.len(),
            members,
        });
    }
    classes
}

/// Default highest derivative order: largest finite distance plus one.
pub fn default_z(dist: &DistanceTable) -> usize {
    diameter_of(dist).value + 1
}

/// Relation orders for every `(node, class)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationIndex {
    n: usize,
    z: u32,
    classes: Vec<EdgeClass>,
    /// `orders[p * classes + c]`
    orders: Vec<u32>,
    /// First order at which the class generically shows a jump at `p`,
    /// from head distances; equal to `orders` wherever that is nonzero.
    generic: Vec<u32>,
}

impl RelationIndex {
    pub fn build(g: &Digraph, z: usize) -> Result<Self, RelationError> {
        let dist = all_pairs_distances(g);
        Self::from_distances(g, &dist, z)
    }

    /// Builds with `z` = largest finite distance + 1.
    pub fn with_default_z(g: &Digraph) -> Self {
        let dist = all_pairs_distances(g);
        let z = default_z(&dist);
        Self::from_distances(g, &dist, z).expect("default z is positive")
    }

    pub fn from_distances(g: &Digraph, dist: &DistanceTable, z: usize) -> Result<Self, RelationError> {
        if z == 0 {
            return Err(RelationError::ZeroOrder);
        }
        let classes = build_classes(g);
        let n = g.n();
        let c = classes.len();
        let mut orders = vec![0u32; n * c];
        let mut generic = vec![0u32; n * c];
        let cap = |k: usize| if k <= z { k as u32 } else { 0 };
        for p in 0..n {
            let d = |v: NodeId| dist.get(v, p);
            for class in &classes {
                let k = class
                    .members
                    .iter()
                    .map(|&(q, r)| directed_relation(d(q), d(r)))
                    .max()
                    .unwrap_or(0);
                // Generic first order: nearest perturbed row (head) plus one.
                let nearest_head = class.members.iter().filter_map(|&(_, r)| d(r)).min();
                orders[p * c + class.id] = cap(k);
                generic[p * c + class.id] = nearest_head.map_or(0, |h| cap(h + 1));
            }
        }
        Ok(Self {
            n,
            z: z as u32,
            classes,
            orders,
            generic,
        })
    }

    /// Index over an explicit order table (`orders[p][class]`), for synthetic
    /// instances. Generic orders are taken equal to the given orders.
    pub fn from_orders(
        n: usize,
        z: usize,
        classes: Vec<EdgeClass>,
        orders: Vec<Vec<u32>>,
    ) -> Result<Self, RelationError> {
        if z == 0 {
            return Err(RelationError::ZeroOrder);
        }
        if orders.len() != n {
            return Err(RelationError::TableShape {
                expected: n,
                got: orders.len(),
            });
        }
        let c = classes.len();
        let mut flat = Vec::with_capacity(n * c);
        for row in orders {
            if row.len() != c {
                return Err(RelationError::TableShape {
                    expected: c,
                    got: row.len(),
                });
            }
            if let Some(&k) = row.iter().find(|&&k| k as usize > z) {
                return Err(RelationError::OrderAboveZ { order: k, z: z as u32 });
            }
            flat.extend(row);
        }
        let classes = classes
            .into_iter()
            .enumerate()
            .map(|(id, mut cl)| {
                cl.id = id;
                cl
            })
            .collect();
        Ok(Self {
            n,
            z: z as u32,
            classes,
            generic: flat.clone(),
            orders: flat,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> usize {
        self.z as usize
    }

    pub fn classes(&self) -> &[EdgeClass] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, e: Edge) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(e))
    }

    /// Relation order of class `c` at node `p`.
    pub fn order(&self, p: NodeId, c: usize) -> u32 {
        self.orders[p * self.classes.len() + c]
    }

    /// Generic first-jump order of class `c` at node `p`.
    pub fn generic_order(&self, p: NodeId, c: usize) -> u32 {
        self.generic[p * self.classes.len() + c]
    }

    fn row(&self, p: NodeId) -> &[u32] {
        let c = self.classes.len();
        &self.orders[p * c..(p + 1) * c]
    }

    /// Number of classes no sensor in `m` relates to.
    pub fn f_d(&self, m: &[NodeId]) -> usize {
        self.undetected(m).len()
    }

    pub fn undetected(&self, m: &[NodeId]) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| m.iter().all(|&p| self.order(p, c) == 0))
            .collect()
    }

    /// `{(k, p) : p in m}` including zero orders.
    pub fn signature(&self, m: &[NodeId], c: usize) -> Signature {
        let mut entries: Vec<(u32, NodeId)> = m.iter().map(|&p| (self.order(p, c), p)).collect();
        entries.sort_unstable();
        entries.dedup();
        Signature { entries }
    }

    fn vector(&self, m: &[NodeId], c: usize) -> Vec<u32> {
        m.iter().map(|&p| self.order(p, c)).collect()
    }

    /// Number of classes whose signature over `m` is shared with another class.
    pub fn f_i(&self, m: &[NodeId]) -> usize {
        self.unresolved(m).len()
    }

    pub fn unresolved(&self, m: &[NodeId]) -> Vec<usize> {
        let mut m: Vec<NodeId> = m.to_vec();
        m.sort_unstable();
        m.dedup();
        let mut groups: HashMap<Vec<u32>, usize> = HashMap::new();
        for c in 0..self.classes.len() {
            *groups.entry(self.vector(&m, c)).or_default() += 1;
        }
        (0..self.classes.len())
            .filter(|&c| groups[&self.vector(&m, c)] > 1)
            .collect()
    }

    /// Dump as CSV: `class_id, tail, head, bidirectional, <one column per node>`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = ["class_id", "tail", "head", "bidirectional"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend((1..=self.n).map(|p| format!("n{p}")));
        w.write_record(&header)?;
        for cl in &self.classes {
            let (t, h) = cl.representative();
            let mut rec = vec![
                cl.id.to_string(),
                (t + 1).to_string(),
                (h + 1).to_string(),
                (cl.is_bidirectional() as u8).to_string(),
            ];
            rec.extend((0..self.n).map(|p| self.order(p, cl.id).to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-node rows, used by the greedy partition refinement.
    pub(crate) fn node_row(&self, p: NodeId) -> &[u32] {
        self.row(p)
    }
}

/// The set `{(k, p)}` for one class over a sensor set, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub entries: Vec<(u32, NodeId)>,
}

impl Signature {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
