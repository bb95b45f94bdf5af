//! Plain-text edge-list format.
//!
//! ```text
//! # comment
//! n 4
//! 1 2 1.0
//! 2 3 0.5 b
//! 3 2 0.5 b
//! ```
//!
//! Node labels are 1-based. A trailing `b` marks a bidirectional link; both
//! orientations must carry it.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::{Digraph, GraphError, InWeighting};

#[derive(Debug, Error, PartialEq)]
pub enum EdgeListError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `n <count>` header")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error(transparent)]
    Invalid(#[from] GraphError),
}

fn syntax(line: usize, msg: impl Into<String>) -> EdgeListError {
    EdgeListError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses an edge-list document into a digraph and its in-weighting.
pub fn parse(text: &str) -> Result<(Digraph, InWeighting), EdgeListError> {
    let mut n: Option<usize> = None;
    let mut arcs = Vec::new();
    let mut bidi = Vec::new();
    let mut weights = Vec::new();
    let mut seen = std::collections::HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if n.is_none() {
            if toks.len() != 2 || toks[0] != "n" {
                return Err(syntax(line, "expected header `n <count>`"));
            }
            let count = toks[1]
                .parse::<usize>()
                .map_err(|_| syntax(line, format!("bad node count `{}`", toks[1])))?;
            n = Some(count);
            continue;
        }
        let count = n.expect("header parsed");
        if !(3..=4).contains(&toks.len()) {
            return Err(syntax(line, "expected `tail head weight [b]`"));
        }
        let label = |s: &str| -> Result<usize, EdgeListError> {
            let v = s
                .parse::<usize>()
                .map_err(|_| syntax(line, format!("bad node label `{s}`")))?;
            if v == 0 || v > count {
                return Err(syntax(line, format!("node {v} outside 1..={count}")));
            }
            Ok(v - 1)
        };
        let tail = label(toks[0])?;
        let head = label(toks[1])?;
        let w = toks[2]
            .parse::<f64>()
            .map_err(|_| syntax(line, format!("bad weight `{}`", toks[2])))?;
        if !w.is_finite() {
            return Err(syntax(line, "weight must be finite"));
        }
        if let Some(&first) = seen.get(&(tail, head)) {
            return Err(syntax(
                line,
                format!("duplicate edge {} {} (first on line {first})", tail + 1, head + 1),
            ));
        }
        seen.insert((tail, head), line);
        match toks.get(3) {
            None => {}
            Some(&"b") => {
                if tail == head {
                    return Err(EdgeListError::Graph {
                        line,
                        source: GraphError::SelfLoopBidirectional(tail),
                    });
                }
                bidi.push(((tail, head), line));
            }
            Some(other) => return Err(syntax(line, format!("unknown flag `{other}`"))),
        }
        arcs.push((tail, head));
        weights.push((tail, head, w));
    }
    let n = n.ok_or(EdgeListError::MissingHeader)?;
    for &((t, h), line) in &bidi {
        if !bidi.iter().any(|&(e, _)| e == (h, t)) {
            return Err(EdgeListError::Graph {
                line,
                source: GraphError::BidirectionalMissingReverse(t, h),
            });
        }
    }
    let g = Digraph::new(n, arcs, bidi.iter().map(|&(e, _)| e))?;
    let mut a = DMatrix::zeros(n, n);
    for (t, h, w) in weights {
        a[(h, t)] = w;
    }
    let a = InWeighting::new(&g, a)?;
    Ok((g, a))
}

/// Serializes a digraph and in-weighting in the edge-list format.
pub fn write(g: &Digraph, a: &InWeighting) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", g.n()).unwrap();
    for (t, h) in g.edges() {
        let flag = if g.is_bidirectional((t, h)) { " b" } else { "" };
        writeln!(out, "{} {} {}{}", t + 1, h + 1, a.get(h, t), flag).unwrap();
    }
    out
}
