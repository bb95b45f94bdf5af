#![allow(dead_code)]

use linkfdi::graph::{Digraph, Edge, InWeighting};
use linkfdi::signal::{InputSignal, Waveform};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random digraph: each unordered pair becomes a bidirectional link with
/// probability `p * bidi`, otherwise each orientation appears independently
/// with probability `p`.
pub fn random_digraph(r: &mut ChaCha8Rng, n: usize, p: f64, bidi: f64) -> Digraph {
    let mut arcs = Vec::new();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p * bidi) {
                arcs.push((a, b));
                arcs.push((b, a));
                pairs.push((a, b));
                pairs.push((b, a));
            } else {
                if r.random_bool(p) {
                    arcs.push((a, b));
                }
                if r.random_bool(p) {
                    arcs.push((b, a));
                }
            }
        }
    }
    Digraph::new(n, arcs, pairs).unwrap()
}

/// Magnitudes in `[0.5, 1.5]`, signs random when `signed`.
pub fn random_weight(r: &mut ChaCha8Rng, signed: bool) -> f64 {
    let w = r.random_range(0.5..=1.5);
    if signed && r.random_bool(0.5) {
        -w
    } else {
        w
    }
}

pub fn random_weights(r: &mut ChaCha8Rng, g: &Digraph, signed: bool) -> InWeighting {
    let w: Vec<(usize, usize, f64)> = g
        .edges()
        .map(|(t, h)| (t, h, random_weight(r, signed)))
        .collect();
    InWeighting::from_edge_weights(g, w).unwrap()
}

pub fn random_state(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| random_weight(r, true)).collect()
}

/// Non-zero smooth input with one or two channels.
pub fn random_input(r: &mut ChaCha8Rng, n: usize) -> InputSignal {
    let m = r.random_range(1..=2);
    let b = DMatrix::from_fn(n, m, |_, _| r.random_range(-1.0..=1.0));
    let comps = (0..m)
        .map(|_| {
            if r.random_bool(0.5) {
                let deg = r.random_range(2..=6);
                Waveform::Polynomial((0..=deg).map(|_| r.random_range(-1.0..=1.0)).collect())
            } else {
                Waveform::Sinusoid {
                    amplitude: r.random_range(0.5..=1.5),
                    omega: r.random_range(0.5..=2.0),
                    phase: r.random_range(0.0..=6.0),
                }
            }
        })
        .collect();
    InputSignal::new(b, comps).unwrap()
}

/// Derivatives `x^(0..=k)` at `(t, x)` by the recursion
/// `x^(r) = M x^(r-1) + B w^(r-1)`.
pub fn derivative_chain(m: &DMatrix<f64>, input: &InputSignal, x: &[f64], t: f64, k: usize) -> Vec<DVector<f64>> {
    let mut out = vec![DVector::from_column_slice(x)];
    for r in 1..=k {
        let next = m * &out[r - 1] + input.forcing(r - 1, t).unwrap();
        out.push(next);
    }
    out
}

/// Jump of the `k`-th derivative at node `p` via the derivative recursion,
/// written independently of the library's closed-form expression.
pub fn jump_by_recursion(
    a: &InWeighting,
    abar: &InWeighting,
    input: &InputSignal,
    x: &[f64],
    t: f64,
    p: usize,
    k: usize,
) -> f64 {
    let after = derivative_chain(abar.matrix(), input, x, t, k);
    let before = derivative_chain(a.matrix(), input, x, t, k);
    after[k][p] - before[k][p]
}

/// Some non-loop edge of `g`, or `None`.
pub fn pick_edge(r: &mut ChaCha8Rng, g: &Digraph, bidirectional: bool) -> Option<Edge> {
    let edges: Vec<Edge> = g
        .edges()
        .filter(|&(t, h)| t != h && g.is_bidirectional((t, h)) == bidirectional)
        .collect();
    if edges.is_empty() {
        None
    } else {
        Some(edges[r.random_range(0..edges.len())])
    }
}

/// `e^{M}` by scaling and squaring with a Taylor kernel.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = m.iter().map(|v| v.abs()).fold(0.0, f64::max) * m.nrows() as f64;
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / 2f64.powi(s);
    let n = m.nrows();
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for i in 1..=20 {
        term = &term * &scaled / i as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}
