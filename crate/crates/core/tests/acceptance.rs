//! Acceptance suite. Prints one PASS/FAIL line per criterion. With
//! `ACCEPTANCE_STRICT` set, any failing criterion makes the process exit 1.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use linkfdi::diagnosis::{extract_signature, match_signature, Verdict};
use linkfdi::experiments::{demo_geometric, run_sweep, SweepConfig, Variant, ZPolicy};
use linkfdi::failure::{
    apply_failure, check_assumption2, FailureScenario, PerturbationRule, RowOverride,
};
use linkfdi::graph::{
    all_pairs_distances, check_assumption1, phi_enumerate, phi_matrix, Digraph, InWeighting,
};
use linkfdi::jump::{numeric_jump_estimate, oracle_jump, oracle_jump_table, predict_jump_theorem1};
use linkfdi::placement::{
    approximation_report, exhaustive_detection, exhaustive_isolation, greedy_detection,
    greedy_isolation, IsolationOutcome, SensorSet,
};
use linkfdi::randgraphs::{geometric_with_edge_count, random_orientation, watts_strogatz_graph, Family};
use linkfdi::relations::RelationIndex;
use linkfdi::signal::{InputSignal, Waveform};
use linkfdi::simulate::simulate;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use common::*;

/// Jumps below this are treated as absent. Below-distance jumps are exact
/// zeros, so the value only has to sit under genuine ones.
const ZERO: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn non_loop_edges(g: &Digraph) -> usize {
    g.edges().filter(|&(t, h)| t != h).count()
}

fn c1_walk_sums() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for _ in 0..200 {
        let n = r.random_range(2..=8);
        let g = { let dens = r.random_range(0.2..0.6); random_digraph(&mut r, n, dens, 0.3) };
        let loops: Vec<usize> = (0..n).filter(|_| r.random_bool(0.3)).collect();
        let g = g.with_self_loops(loops);
        let a = random_weights(&mut r, &g, true);
        for k in 0..=6 {
            for q in 0..n {
                for p in 0..n {
                    let m = phi_matrix(&a, k, q, p);
                    let e = phi_enumerate(&g, &a, k, q, p).unwrap();
                    worst = worst.max((m - e).abs());
                    checks += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-9, format!("200 graphs, {checks} entries, max |diff| = {worst:.2e} (tol 1e-9)"))
}

/// Random row-`i` perturbation: the failed entry zeroed, other in-weights of
/// `i` possibly changed.
fn random_rule(r: &mut rand_chacha::ChaCha8Rng, g: &Digraph, a: &InWeighting, removed: &[(usize, usize)], rows: &[usize]) -> PerturbationRule {
    if r.random_bool(0.5) {
        return PerturbationRule::ZeroOnly;
    }
    let n = g.n();
    let overrides = rows
        .iter()
        .map(|&i| {
            let values = (0..n)
                .map(|q| {
                    if removed.contains(&(q, i)) || !g.contains((q, i)) {
                        0.0
                    } else if r.random_bool(0.5) {
                        a.get(i, q) + r.random_range(-0.5..=0.5)
                    } else {
                        a.get(i, q)
                    }
                })
                .collect();
            RowOverride { row: i, values }
        })
        .collect();
    PerturbationRule::ExplicitRow(overrides)
}

fn perturbation(a: &InWeighting, abar: &InWeighting, x: &[f64], i: usize) -> f64 {
    (0..a.n()).map(|q| (abar.get(i, q) - a.get(i, q)) * x[q]).sum()
}

struct JumpBatchStats {
    cases: usize,
    skipped: usize,
    checks: usize,
    oracle_vs_recursion: f64,
    closed_form_err: f64,
    below_max: f64,
    first_order_mismatch: usize,
    first_order_checks: usize,
    factor_err: f64,
}

fn jump_batch() -> JumpBatchStats {
    let mut r = rng(2);
    let mut s = JumpBatchStats {
        cases: 0,
        skipped: 0,
        checks: 0,
        oracle_vs_recursion: 0.0,
        closed_form_err: 0.0,
        below_max: 0.0,
        first_order_mismatch: 0,
        first_order_checks: 0,
        factor_err: 0.0,
    };
    while s.cases < 500 {
        let n = r.random_range(3..=10);
        let g = { let dens = r.random_range(0.15..0.45); random_digraph(&mut r, n, dens, 0.0) };
        let loops: Vec<usize> = (0..n).filter(|_| r.random_bool(0.3)).collect();
        let g = g.with_self_loops(loops);
        let Some((j, i)) = pick_edge(&mut r, &g, false) else { continue };
        let a = random_weights(&mut r, &g, true);
        let rule = random_rule(&mut r, &g, &a, &[(j, i)], &[i]);
        let sc = FailureScenario::unidirectional((j, i), 1.0).with_rule(rule);
        let (_, abar) = apply_failure(&g, &a, &sc).unwrap();
        let x = random_state(&mut r, n);
        let input = random_input(&mut r, n);
        let t_f = r.random_range(0.0..2.0);
        let sum = perturbation(&a, &abar, &x, i);
        if !check_assumption1(&g, &a, 1e-6).is_empty() || sum.abs() < 1e-3 {
            s.skipped += 1;
            continue;
        }
        s.cases += 1;
        let dist = all_pairs_distances(&g);
        for p in 0..n {
            let (Some(dj), di) = (dist.get(j, p), dist.get(i, p)) else { continue };
            let mut first_nonzero = None;
            for k in 1..=dj {
                let o = oracle_jump(&a, &abar, &input, &x, t_f, p, k).unwrap();
                let rec = jump_by_recursion(&a, &abar, &input, &x, t_f, p, k);
                s.oracle_vs_recursion = s.oracle_vs_recursion.max(rel_err(o, rec));
                let t = predict_jump_theorem1(&dist, &a, &abar, &x, (j, i), p, k).unwrap();
                s.checks += 1;
                if k < dj {
                    s.below_max = s.below_max.max(o.abs());
                } else {
                    s.closed_form_err = s.closed_form_err.max(rel_err(o, t));
                }
                if first_nonzero.is_none() && o.abs() > ZERO {
                    first_nonzero = Some(k);
                }
            }
            // Within k <= dist(j,p): first jump at dist(i,p)+1 exactly when
            // dist(i,p)+1 = dist(j,p).
            let adjacent = di.map(|d| d + 1) == Some(dj);
            s.first_order_checks += 1;
            let expected = adjacent.then_some(dj);
            if first_nonzero != expected {
                s.first_order_mismatch += 1;
            }
            if adjacent {
                let o = oracle_jump(&a, &abar, &input, &x, t_f, p, dj).unwrap();
                let phi = phi_matrix(&a, dj - 1, i, p);
                s.factor_err = s.factor_err.max(rel_err(o / sum, phi));
            }
        }
    }
    s
}

fn c2_closed_form(s: &JumpBatchStats) -> Outcome {
    let pass = s.closed_form_err <= 1e-8 && s.below_max <= 1e-10 && s.oracle_vs_recursion <= 1e-8;
    outcome(
        pass,
        format!(
            "{} cases ({} non-generic draws redrawn), {} (p,k) checks; max rel err at k = dist {:.2e}, max |jump| below dist {:.2e}, oracle vs derivative recursion {:.2e}",
            s.cases, s.skipped, s.checks, s.closed_form_err, s.below_max, s.oracle_vs_recursion
        ),
    )
}

fn c3_first_jump(s: &JumpBatchStats) -> Outcome {
    let pass = s.first_order_mismatch == 0 && s.factor_err <= 1e-8;
    outcome(
        pass,
        format!(
            "{} node checks, {} first-order mismatches; max rel err of jump / perturbation vs walk sum {:.2e}",
            s.first_order_checks, s.first_order_mismatch, s.factor_err
        ),
    )
}

fn c4_bidirectional() -> Outcome {
    let mut r = rng(4);
    let mut cases = 0;
    let mut related = 0;
    let mut mismatches = 0;
    // (endpoint distance d) -> histogram of measured first orders
    let mut equal: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut prop_agree = 0;
    while cases < 200 {
        let n = r.random_range(3..=9);
        let bidi = if r.random_bool(0.5) { 1.0 } else { 0.6 };
        let g = { let dens = r.random_range(0.2..0.5); random_digraph(&mut r, n, dens, bidi) };
        let Some((j, i)) = pick_edge(&mut r, &g, true) else { continue };
        let a = random_weights(&mut r, &g, true);
        let sc = FailureScenario::bidirectional((j, i), 1.0).with_rule(PerturbationRule::ZeroOnly);
        let (_, abar) = apply_failure(&g, &a, &sc).unwrap();
        let x = random_state(&mut r, n);
        let input = random_input(&mut r, n);
        if !check_assumption1(&g, &a, 1e-6).is_empty()
            || perturbation(&a, &abar, &x, i).abs() < 1e-3
            || perturbation(&a, &abar, &x, j).abs() < 1e-3
        {
            continue;
        }
        cases += 1;
        let dist = all_pairs_distances(&g);
        let table = oracle_jump_table(&a, &abar, &input, &x, 0.5, &(0..n).collect::<Vec<_>>(), n + 1).unwrap();
        for p in 0..n {
            let (Some(di), Some(dj)) = (dist.get(i, p), dist.get(j, p)) else { continue };
            let measured = table.first_order_above(p, ZERO).unwrap();
            let definition = if di.abs_diff(dj) == 1 { di.max(dj) } else { 0 };
            if di.max(dj) + 1 == measured {
                prop_agree += 1;
            }
            if definition >= 1 {
                related += 1;
                if measured != definition {
                    mismatches += 1;
                }
            } else if di == dj {
                *equal.entry(di).or_default().entry(measured).or_default() += 1;
            }
        }
    }
    let report: Vec<String> = equal
        .iter()
        .map(|(d, h)| {
            let hist: Vec<String> = h.iter().map(|(k, c)| format!("k={k}:{c}")).collect();
            format!("d={d} -> {}", hist.join(" "))
        })
        .collect();
    outcome(
        mismatches == 0,
        format!(
            "{cases} cases, {related} related (node, class) pairs, {mismatches} mismatches; equal endpoint distances measured [{}]; max(d)+1 matched the first jump in {prop_agree} pairs",
            report.join("; ")
        ),
    )
}

/// Exact `x(t)` for polynomial inputs via an augmented matrix exponential.
fn exact_state(a: &DMatrix<f64>, input: &InputSignal, x0: &[f64], t0: f64, t: f64) -> DVector<f64> {
    let n = a.nrows();
    let degrees: Vec<usize> = input
        .components()
        .iter()
        .map(|w| match w {
            Waveform::Zero => 0,
            Waveform::Polynomial(c) => c.len().saturating_sub(1),
            Waveform::Sinusoid { .. } => panic!("polynomial inputs only"),
        })
        .collect();
    let size = n + degrees.iter().map(|d| d + 1).sum::<usize>();
    let mut m = DMatrix::zeros(size, size);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    let mut z0 = DVector::zeros(size);
    z0.rows_mut(0, n).copy_from_slice(x0);
    let mut off = n;
    for (c, (&d, w)) in degrees.iter().zip(input.components()).enumerate() {
        for row in 0..n {
            m[(row, off)] = input.b()[(row, c)];
        }
        for r in 0..=d {
            z0[off + r] = w.derivative(r, t0);
            if r < d {
                m[(off + r, off + r + 1)] = 1.0;
            }
        }
        off += d + 1;
    }
    (expm(&(m * (t - t0))) * z0).rows(0, n).into_owned()
}

fn random_poly_input(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> InputSignal {
    if r.random_bool(0.3) {
        return InputSignal::zero(n);
    }
    let b = DMatrix::from_fn(n, 1, |_, _| r.random_range(-1.0..=1.0));
    let coeffs = (0..=4).map(|_| r.random_range(-1.0..=1.0)).collect();
    InputSignal::new(b, vec![Waveform::Polynomial(coeffs)]).unwrap()
}

fn c5_simulation() -> Outcome {
    let mut r = rng(5);
    let (t0, t_f, t_end, step) = (0.0, 0.5, 1.0, 1e-3);
    let mut worst: f64 = 0.0;
    let mut worst_state: f64 = 0.0;
    let mut worst_post: f64 = 0.0;
    let mut cases = Vec::new();
    let p3 = Digraph::path(3);
    let a3 = InWeighting::unit(&p3);
    cases.push((
        p3,
        a3,
        FailureScenario::unidirectional((0, 1), t_f).with_rule(PerturbationRule::ZeroOnly),
        InputSignal::zero(3),
        vec![1.0, 0.0, 0.0],
    ));
    while cases.len() < 11 {
        let n = r.random_range(2..=6);
        let g = random_digraph(&mut r, n, 0.5, 0.3);
        let bidi = r.random_bool(0.3);
        let Some(e) = pick_edge(&mut r, &g, bidi).or_else(|| pick_edge(&mut r, &g, !bidi)) else { continue };
        let a = random_weights(&mut r, &g, true);
        let sc = if g.is_bidirectional(e) {
            FailureScenario::bidirectional(e, t_f)
        } else {
            FailureScenario::unidirectional(e, t_f)
        };
        let input = random_poly_input(&mut r, n);
        let x0 = random_state(&mut r, n);
        cases.push((g, a, sc, input, x0));
    }
    for (g, a, sc, input, x0) in &cases {
        let (_, abar) = apply_failure(g, a, sc).unwrap();
        let traj = simulate(g, a, input, x0, t0, Some(sc), t_end, step).unwrap();
        let x_tf = exact_state(a.matrix(), input, x0, t0, t_f);
        let (_, sampled) = traj.failure_sample().unwrap();
        worst_state = worst_state.max((sampled - &x_tf).amax());
        let (_, x_end) = traj.last().unwrap();
        let exact_end = exact_state(abar.matrix(), input, x_tf.as_slice(), t_f, t_end);
        worst_post = worst_post.max((x_end - exact_end).amax());
        for p in 0..g.n() {
            for k in 1..=3 {
                let est = numeric_jump_estimate(&traj, a, &abar, input, p, k).unwrap();
                let exact = oracle_jump(a, &abar, input, x_tf.as_slice(), t_f, p, k).unwrap();
                worst = worst.max((est - exact).abs());
            }
        }
    }
    outcome(
        worst <= 1e-4 && worst_post <= 1e-6,
        format!(
            "P3 + 10 random cases, step 1e-3: max |estimate - oracle| for k<=3 = {worst:.2e} (tol 1e-4); x(t_f) error {worst_state:.2e}; post-failure state vs matrix exponential {worst_post:.2e} (tol 1e-6)"
        ),
    )
}

fn small_instance(r: &mut rand_chacha::ChaCha8Rng, nmin: usize, nmax: usize) -> Digraph {
    let n = r.random_range(nmin..=nmax);
    let bidi = [0.0, 0.5, 1.0][r.random_range(0..3)];
    { let dens = r.random_range(0.25..0.6); random_digraph(r, n, dens, bidi) }
}

fn c6_ratio() -> Outcome {
    let mut r = rng(6);
    let mut det_one = 0;
    let mut iso_cases = 0;
    let mut iso_one = 0;
    let mut violations = 0;
    let mut worst: f64 = 1.0;
    let (mut unseeded_one, mut unseeded_worst) = (0, 1.0f64);
    let empty = SensorSet { sensors: Vec::new(), residuals: Vec::new() };
    for _ in 0..100 {
        let g = small_instance(&mut r, 3, 7);
        let idx = RelationIndex::with_default_z(&g);
        let edges = non_loop_edges(&g);
        let greedy = greedy_detection(&idx).unwrap();
        let opt = exhaustive_detection(&idx).unwrap().unwrap();
        let rep = approximation_report(&greedy, &opt, edges);
        violations += usize::from(rep.violated);
        worst = worst.max(rep.ratio);
        det_one += usize::from(rep.ratio == 1.0);
        if let Some(opt) = exhaustive_isolation(&idx).unwrap() {
            iso_cases += 1;
            match greedy_isolation(&idx, &greedy) {
                IsolationOutcome::Isolated(s) => {
                    let rep = approximation_report(&s, &opt, edges);
                    violations += usize::from(rep.violated);
                    worst = worst.max(rep.ratio);
                    iso_one += usize::from(rep.ratio == 1.0);
                }
                IsolationOutcome::Empty { .. } => violations += 1,
            }
            if let IsolationOutcome::Isolated(s) = greedy_isolation(&idx, &empty) {
                let rep = approximation_report(&s, &opt, edges);
                unseeded_worst = unseeded_worst.max(rep.ratio);
                unseeded_one += usize::from(rep.ratio == 1.0);
            }
        }
    }
    let det_frac = det_one as f64 / 100.0;
    let iso_frac = iso_one as f64 / iso_cases.max(1) as f64;
    outcome(
        violations == 0 && det_frac >= 0.8 && iso_frac >= 0.8,
        format!(
            "100 instances (n<=7): bound violations {violations}, worst ratio {worst:.3}; ratio 1 for detection in {:.0}%, for isolation in {:.0}% of {iso_cases} isolable instances (target >= 80%); isolation greedy started from the empty set: ratio 1 in {unseeded_one}/{iso_cases}, worst {unseeded_worst:.3}",
            det_frac * 100.0,
            iso_frac * 100.0
        ),
    )
}

fn set_of(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|v| mask >> v & 1 == 1).collect()
}

/// `(monotonicity violations, supermodularity violations)` over all chains.
fn chain_violations(n: usize, f: impl Fn(&[usize]) -> usize) -> (usize, usize) {
    let vals: Vec<i64> = (0..1usize << n).map(|m| f(&set_of(m, n)) as i64).collect();
    let (mut mono, mut sup) = (0, 0);
    for big in 0..1usize << n {
        // every submask `small` of `big`
        let mut small = big;
        loop {
            if vals[big] > vals[small] {
                mono += 1;
            }
            for v in (0..n).filter(|v| big >> v & 1 == 0) {
                let gain_small = vals[small | 1 << v] - vals[small];
                let gain_big = vals[big | 1 << v] - vals[big];
                if gain_small > gain_big || gain_big > 0 {
                    sup += 1;
                }
            }
            if small == 0 {
                break;
            }
            small = (small - 1) & big;
        }
    }
    (mono, sup)
}

fn c7_supermodularity() -> Outcome {
    let mut r = rng(7);
    let (mut d_mono, mut d_sup, mut i_mono, mut i_sup) = (0, 0, 0, 0);
    let mut graphs_with_fi_violation = 0;
    for _ in 0..20 {
        let g = small_instance(&mut r, 3, 6);
        let idx = RelationIndex::with_default_z(&g);
        let n = g.n();
        let (m, s) = chain_violations(n, |set| idx.f_d(set));
        d_mono += m;
        d_sup += s;
        let (m, s) = chain_violations(n, |set| idx.f_i(set));
        i_mono += m;
        i_sup += s;
        graphs_with_fi_violation += usize::from(s > 0);
    }
    outcome(
        d_mono + d_sup + i_mono + i_sup == 0,
        format!(
            "20 graphs (n<=6), all chains: f_D monotonicity/supermodularity violations {d_mono}/{d_sup}; f_I {i_mono}/{i_sup} (in {graphs_with_fi_violation} graphs)"
        ),
    )
}

fn c8_round_trip() -> Outcome {
    let mut r = rng(8);
    let mut instances = 0;
    let mut injected = 0;
    let mut isolated = 0;
    let mut detected_with_truth = 0;
    let mut shared_head = 0;
    let mut forced = 0;
    let mut forced_flagged = 0;
    let mut forced_isolated = 0;
    let mut attempts = 0;
    while instances < 50 {
        attempts += 1;
        let g = small_instance(&mut r, 4, 9);
        let idx = RelationIndex::with_default_z(&g);
        let Ok(md) = greedy_detection(&idx) else { continue };
        let IsolationOutcome::Isolated(mi) = greedy_isolation(&idx, &md) else { continue };
        if idx.class_count() == 0 {
            continue;
        }
        instances += 1;
        let sensors = mi.sensors.clone();
        for class in idx.classes() {
            let (j, i) = class.representative();
            let sc = if class.is_bidirectional() {
                FailureScenario::bidirectional((j, i), 1.0)
            } else {
                FailureScenario::unidirectional((j, i), 1.0)
            }
            .with_rule(PerturbationRule::ZeroOnly);
            let rows = sc.affected_rows();
            // Generic draw.
            let (a, abar, x) = loop {
                let a = random_weights(&mut r, &g, true);
                let (_, abar) = apply_failure(&g, &a, &sc).unwrap();
                let x = random_state(&mut r, g.n());
                let ok = check_assumption1(&g, &a, 1e-6).is_empty()
                    && check_assumption2(&a, &abar, &x, &rows, 1e-3).unwrap().holds();
                if ok {
                    break (a, abar, x);
                }
            };
            let input = random_input(&mut r, g.n());
            let table = oracle_jump_table(&a, &abar, &input, &x, 1.0, &sensors, idx.z()).unwrap();
            let sig = extract_signature(&table, &sensors, ZERO).unwrap();
            injected += 1;
            match match_signature(&idx, &sig).map(|d| d.verdict) {
                Ok(Verdict::Isolated(c)) if c == class.id => isolated += 1,
                Ok(Verdict::Detected(cands)) if cands.contains(&class.id) => {
                    detected_with_truth += 1;
                    let heads: Vec<usize> = cands.iter().map(|&c| idx.classes()[c].representative().1).collect();
                    if !class.is_bidirectional() && heads.iter().all(|&h| h == i) {
                        shared_head += 1;
                    }
                }
                _ => {}
            }
            // Forced violation: zero the state entries the perturbation reads.
            let mut xo = x.clone();
            for &(t, _) in &sc.removed_edges(&g) {
                xo[t] = 0.0;
            }
            forced += 1;
            if !check_assumption2(&a, &abar, &xo, &rows, 1e-9).unwrap().holds() {
                forced_flagged += 1;
            }
            let table = oracle_jump_table(&a, &abar, &InputSignal::zero(g.n()), &xo, 1.0, &sensors, idx.z()).unwrap();
            let sig = extract_signature(&table, &sensors, ZERO).unwrap();
            if let Ok(Verdict::Isolated(c)) = match_signature(&idx, &sig).map(|d| d.verdict) {
                forced_isolated += usize::from(c == class.id);
            }
        }
    }
    let frac = isolated as f64 / injected as f64;
    outcome(
        isolated == injected && forced_flagged == forced,
        format!(
            "{instances} isolation-feasible instances ({attempts} drawn), {injected} injected failures: Isolated(true class) {:.1}%, Detected with true class among candidates {detected_with_truth} (of which {shared_head} unidirectional failures whose candidates all share its head), other {}; forced orthogonal states flagged by the genericity check {forced_flagged}/{forced} (still isolated by chance: {forced_isolated})",
            frac * 100.0,
            injected - isolated - detected_with_truth
        ),
    )
}

fn sweep(base: Family, param: &str, values: Vec<f64>, instances: usize, seed: u64, variant: Variant) -> linkfdi::experiments::SweepResults {
    run_sweep(&SweepConfig {
        base,
        param: param.into(),
        values,
        instances,
        seed_base: seed,
        z: ZPolicy::DiameterPlusOne,
        variant,
    })
    .unwrap()
}

fn c9_diameter() -> Outcome {
    let dense = sweep(Family::ErdosRenyi { n: 75, p: 0.35, directed: true }, "p", vec![0.35, 0.5], 50, 900, Variant::AsGenerated);
    let mut parts = Vec::new();
    let mut pass = true;
    for p in [0.35, 0.5] {
        let d2 = dense
            .rows
            .iter()
            .filter(|r| r.param_value == p && r.stats.diameter == 2 && !r.stats.has_unreachable_pairs)
            .count();
        pass &= d2 >= 45;
        parts.push(format!("n=75 p={p}: {d2}/50 diameter 2"));
    }
    let sparse = sweep(
        Family::ErdosRenyi { n: 60, p: 0.1, directed: true },
        "n",
        vec![60.0, 70.0, 80.0, 90.0, 100.0],
        50,
        950,
        Variant::AsGenerated,
    );
    for n in [60.0, 70.0, 80.0, 90.0, 100.0] {
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        for r in sparse.rows.iter().filter(|r| r.param_value == n) {
            *hist.entry(r.stats.diameter).or_default() += 1;
        }
        let mode = hist.iter().max_by_key(|(d, c)| (**c, std::cmp::Reverse(**d))).map(|(d, _)| *d).unwrap();
        pass &= mode == 3;
        let h: Vec<String> = hist.iter().map(|(d, c)| format!("{d}:{c}")).collect();
        parts.push(format!("p=0.1 n={n}: mode {mode} [{}]", h.join(" ")));
    }
    outcome(pass, parts.join("; "))
}

fn c10_directionality() -> Outcome {
    let directed = sweep(Family::ErdosRenyi { n: 50, p: 0.1, directed: true }, "p", vec![0.1], 50, 1000, Variant::AsGenerated);
    let undirected = sweep(Family::ErdosRenyi { n: 50, p: 0.1, directed: false }, "p", vec![0.1], 50, 1000, Variant::AsGenerated);
    let md = |res: &linkfdi::experiments::SweepResults| res.summary()[0].mean("md_size").unwrap();
    let (md_dir, md_und) = (md(&directed), md(&undirected));
    let mut bi_frac = 0.0;
    let mut or_frac = 0.0;
    let mut per_instance_wins = 0;
    for seed in 0..10 {
        let (g, _) = geometric_with_edge_count(50, 200, 1.0, seed).unwrap();
        let o = random_orientation(&g, seed).unwrap();
        let all: Vec<usize> = (0..50).collect();
        let fb = {
            let idx = RelationIndex::with_default_z(&g);
            idx.f_i(&all) as f64 / idx.class_count() as f64
        };
        let fo = {
            let idx = RelationIndex::with_default_z(&o);
            idx.f_i(&all) as f64 / idx.class_count() as f64
        };
        per_instance_wins += usize::from(fb > fo);
        bi_frac += fb / 10.0;
        or_frac += fo / 10.0;
    }
    outcome(
        md_dir > md_und && bi_frac > or_frac,
        format!(
            "ER n=50 p=0.1, 50 paired seeds: mean |M_D| directed {md_dir:.2} vs undirected {md_und:.2}; geometric 10 instances: unresolved fraction with all nodes observed bidirectional {bi_frac:.3} vs oriented {or_frac:.3} (bidirectional larger in {per_instance_wins}/10)"
        ),
    )
}

fn c11_demo() -> Outcome {
    let rep = demo_geometric(0).unwrap();
    let bi = &rep.treatment("bidirectional").unwrap().stats;
    let pairs = &rep.treatment("unidirectional_pairs").unwrap().stats;
    let or = &rep.treatment("oriented").unwrap().stats;
    outcome(
        bi.fi_residual_all > 0 && pairs.md_size > bi.md_size && pairs.z == bi.z,
        format!(
            "seed 0: bidirectional |M_D|={} z={} f_I(V)={}; unidirectional pairs |M_D|={} z={}; oriented |M_D|={} z={} f_I(M_D)={} f_I(V)={}",
            bi.md_size, bi.z, bi.fi_residual_all, pairs.md_size, pairs.z, or.md_size, or.z, or.fi_residual_md, or.fi_residual_all
        ),
    )
}

fn c12_small_world() -> Outcome {
    let mut count_ok = true;
    for seed in 0..100 {
        for p in [0.0, 0.1, 0.3, 0.5, 1.0] {
            for (n, d) in [(20, 4), (50, 4), (50, 6)] {
                count_ok &= watts_strogatz_graph(n, d, p, seed).unwrap().edge_count() == n * d;
            }
        }
    }
    let ps = vec![0.1, 0.2, 0.3, 0.4, 0.5];
    let by_p = sweep(Family::SmallWorld { n: 50, d: 4, rewire_p: 0.1 }, "rewire_p", ps, 50, 1200, Variant::AsGenerated);
    let means: Vec<f64> = by_p.summary().iter().map(|s| s.mean("md_size").unwrap()).collect();
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = means.iter().copied().fold(0.0, f64::max);
    let overall = means.iter().sum::<f64>() / means.len() as f64;
    let spread = (hi - lo) / overall;
    let max_dev = means.iter().map(|m| (m - overall).abs() / overall).fold(0.0, f64::max);
    let by_d = sweep(Family::SmallWorld { n: 50, d: 2, rewire_p: 0.21 }, "d", vec![2.0, 4.0, 6.0, 8.0, 10.0], 50, 1300, Variant::AsGenerated);
    let z: Vec<f64> = by_d.summary().iter().map(|s| s.mean("z").unwrap()).collect();
    let z_ok = z.windows(2).all(|w| w[1] <= w[0]);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ");
    outcome(
        count_ok && spread < 0.2 && z_ok,
        format!(
            "edge count nd/2 kept over 1500 rewirings: {count_ok}; mean |M_D| over rewire_p 0.1..0.5 [{}] range / grand mean {:.1}% (limit 20%), largest deviation from grand mean {:.1}%; mean z over d=2..10 [{}] non-increasing: {z_ok}",
            fmt(&means),
            spread * 100.0,
            max_dev * 100.0,
            fmt(&z)
        ),
    )
}

fn main() {
    let total = Instant::now();
    let batch_start = Instant::now();
    let batch = jump_batch();
    let batch_time = batch_start.elapsed();
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Outcome>, Option<Duration>)> = vec![
        (1, "walk-sum identity", Box::new(c1_walk_sums), Some(Duration::from_secs(10))),
        (2, "closed-form jump agreement", Box::new(|| c2_closed_form(&batch)), None),
        (3, "first jump order and factorization", Box::new(|| c3_first_jump(&batch)), None),
        (4, "bidirectional consistency", Box::new(c4_bidirectional), None),
        (5, "simulation cross-check", Box::new(c5_simulation), Some(Duration::from_secs(10))),
        (6, "greedy approximation ratio", Box::new(c6_ratio), Some(Duration::from_secs(120))),
        (7, "monotonicity and supermodularity", Box::new(c7_supermodularity), None),
        (8, "round-trip diagnosis", Box::new(c8_round_trip), None),
        (9, "Erdos-Renyi diameter plateau", Box::new(c9_diameter), Some(Duration::from_secs(60))),
        (10, "directionality trends", Box::new(c10_directionality), None),
        (11, "geometric demo", Box::new(c11_demo), None),
        (12, "small-world insensitivity", Box::new(c12_small_world), None),
    ];
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let mut out = run();
        let mut elapsed = start.elapsed();
        if id == 2 {
            elapsed += batch_time;
            if batch_time > Duration::from_secs(30) {
                out.pass = false;
            }
        }
        if let Some(limit) = limit {
            if elapsed > limit {
                out.pass = false;
                out.detail.push_str(&format!("; over time limit {limit:?}"));
            }
        }
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} [{name}]: {status} ({:.2}s) {}", elapsed.as_secs_f64(), out.detail);
        if !out.pass {
            failed.push(id);
        }
    }
    println!("acceptance: {} of 12 criteria passed in {:.1}s", 12 - failed.len(), total.elapsed().as_secs_f64());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        if std::env::var_os("ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
