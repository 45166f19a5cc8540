//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tncircuit::circuit::{input_tensor, Gate, Measurement};
use tncircuit::engine::{expectation, plan, PlannerKind, SimConfig};
use tncircuit::network::TensorNetwork;
use tncircuit::oracle::oracle_expectation;
use tncircuit::ordering::{
    anytime_ordering, line_graph_plan, treewidth_upper_bound, Budget, SimpleGraph,
    TreeDecomposition,
};
use tncircuit::qaoa::{
    edge_observable, expectation_of_cut, product_state_harness, qaoa_circuit, random_regular_graph,
    ring_plus_chords, MaxCutInstance, QaoaParams,
};
use tncircuit::tensor::{ContractOptions, Tensor, WireId, DEFAULT_RANK_CAP};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let t = start.elapsed();
    check(
        t < limit,
        format!("{detail}, {:.1}s of {}s", t.as_secs_f64(), limit.as_secs()),
    )
}

fn w(i: usize) -> WireId {
    WireId(i)
}

fn real(t: &Tensor) -> Vec<C> {
    t.data().to_vec()
}

fn from(values: &[f64]) -> Vec<C> {
    values.iter().map(|&x| C::new(x, 0.0)).collect()
}

fn gate_fidelity() -> Outcome {
    let start = Instant::now();
    let one = |g: Gate| real(&g.tensor(&[w(0)], &[w(1)]));
    let mut bad = Vec::new();
    let mut expect = |name: &str, got: Vec<C>, want: Vec<C>| {
        if got != want {
            bad.push(name.to_string());
        }
    };
    expect(
        "rho0",
        real(&input_tensor(w(0))),
        from(&[1.0, 0.0, 0.0, 0.0]),
    );
    #[rustfmt::skip]
    expect("X", one(Gate::X), from(&[
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
    ]));
    #[rustfmt::skip]
    expect("Y", one(Gate::Y), from(&[
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
        0.0, -1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
    ]));
    // U ⊗ conj(U) for Z; an identity here would be a transcription slip
    #[rustfmt::skip]
    expect("Z", one(Gate::Z), from(&[
        1.0, 0.0, 0.0, 0.0,
        0.0, -1.0, 0.0, 0.0,
        0.0, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    ]));
    let mut cnot = vec![0.0; 256];
    let ones = [
        "0000", "0101", "0202", "0303", "1011", "1110", "1213", "1312", "2022", "2123", "2220",
        "2321", "3033", "3132", "3231", "3330",
    ];
    for idx in ones {
        let d: Vec<usize> = idx.bytes().map(|b| (b - b'0') as usize).collect();
        cnot[64 * d[0] + 16 * d[1] + 4 * d[2] + d[3]] = 1.0;
    }
    expect(
        "CNOT",
        real(&Gate::Cnot.tensor(&[w(0), w(1)], &[w(2), w(3)])),
        from(&cnot),
    );
    let i = C::new(0.0, 1.0);
    let z = C::new(0.0, 0.0);
    let l = C::new(1.0, 0.0);
    for (m, want) in [
        (Measurement::Trace, vec![l, z, z, l]),
        (Measurement::X, vec![z, l, l, z]),
        (Measurement::Y, vec![z, i, -i, z]),
        (Measurement::Z, vec![l, z, z, -l]),
    ] {
        expect(m.keyword(), real(&m.tensor(w(0))), want);
    }
    if !bad.is_empty() {
        return Err(format!("mismatched: {}", bad.join(", ")));
    }
    within(
        Duration::from_secs(1),
        start,
        "rho0, X, Y, Z, CNOT and 4 measurements exact".into(),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut noisy = 0;
    for case in 0..200 {
        let n = rng.gen_range(2..=6);
        let kraus = rng.gen_bool(0.2);
        noisy += kraus as usize;
        let max_gates = if kraus { 24 } else { 25 };
        let rc = random_circuit(&mut rng, n, max_gates, kraus, &Measurement::ALL);
        let c = to_library(&rc);
        let reference = dense_expectation(&rc);
        let lib_oracle = oracle_expectation(&c).map_err(|e| e.to_string())?;
        worst = worst.max((lib_oracle - reference).norm());
        for planner in [PlannerKind::LineGraph, PlannerKind::Stochastic] {
            let cfg = SimConfig::default().with_planner(planner).with_seed(case);
            let v = expectation(&c, &cfg)
                .map_err(|e| format!("case {case}: {e}"))?
                .value;
            worst = worst.max((v - reference).norm());
        }
    }
    let detail =
        format!("200 circuits ({noisy} noisy), both planners, max |tn - oracle| {worst:.2e}");
    if worst > 1e-9 {
        return Err(detail);
    }
    within(Duration::from_secs(120), start, detail)
}

fn plan_independence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = ContractOptions::default();
    let mut worst = 0.0f64;
    let mut permutations = 0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let kraus = rng.gen_bool(0.2);
        let rc = random_circuit(&mut rng, n, 25, kraus, &Measurement::ALL);
        let net = TensorNetwork::from_circuit(&to_library(&rc));
        let mut values = Vec::new();
        for _ in 0..5 {
            let (order, uniform) = random_valid_plan(&net, &mut rng);
            permutations += uniform as usize;
            values.push(net.execute(&order, &opts).map_err(|e| e.to_string())?.value);
        }
        for a in &values {
            for b in &values {
                worst = worst.max((a - b).norm());
            }
        }
    }
    let detail = format!(
        "50 circuits x 5 random plans ({permutations} uniform permutations, rest stochastic), max deviation {worst:.2e}"
    );
    if worst > 1e-9 {
        return Err(detail);
    }
    within(Duration::from_secs(120), start, detail)
}

fn trace_preservation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let rc = random_circuit(&mut rng, n, 25, false, &[Measurement::Trace]);
        let v = expectation(&to_library(&rc), &SimConfig::default())
            .map_err(|e| e.to_string())?
            .value;
        worst = worst.max((v - 1.0).norm());
    }
    let detail = format!("100 unitary circuits, max |value - 1| {worst:.2e}");
    if worst > 1e-10 {
        return Err(detail);
    }
    within(Duration::from_secs(60), start, detail)
}

fn qaoa_sanity() -> Outcome {
    let cfg = SimConfig::default();
    let zero = QaoaParams::single(0.0, 0.0);
    let tri = MaxCutInstance::new(SimpleGraph::complete(3), Some(2)).map_err(|e| e.to_string())?;
    let t = expectation_of_cut(&tri, &zero, &cfg).map_err(|e| e.to_string())?;
    if (t - 1.5).abs() > 1e-10 {
        return Err(format!("triangle gives {t}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let k = [3, 4][i as usize % 2];
        let n = 2 * rng.gen_range(4..=8);
        let inst = random_regular_graph(n, k, i).map_err(|e| e.to_string())?;
        let v = expectation_of_cut(&inst, &zero, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max((v - inst.edges().len() as f64 / 2.0).abs());
    }
    check(
        worst <= 1e-10,
        format!("triangle {t}, 20 regular instances max |<C> - |E|/2| {worst:.2e}"),
    )
}

fn answer_string_harness() -> Outcome {
    let start = Instant::now();
    let report = product_state_harness(6, 10, 2, 10_000, 6).map_err(|e| e.to_string())?;
    // top 10% of 64 strings: at most 6.4 strings ahead of and including the answer
    let top = report.fraction_rank_below(0.1 * 64.0 - 1.0);
    let close = report.fraction_l1_below(0.15);
    let mut l1: Vec<f64> = report.results.iter().map(|r| r.l1).collect();
    l1.sort_by(f64::total_cmp);
    let detail = format!(
        "top-10% fraction {top:.4} (need >= 0.80), l1 < 0.15 fraction {close:.4} (need >= 0.90), median l1 {:.3}",
        l1[l1.len() / 2]
    );
    if top < 0.8 || close < 0.9 {
        return Err(detail);
    }
    within(Duration::from_secs(600), start, detail)
}

fn treewidth_trend() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut widths = Vec::new();
    let mut flops = Vec::new();
    for i in 0..50u64 {
        let k = 3 + (i % 3) as usize;
        let inst = random_regular_graph(14, k, 100 + i).map_err(|e| e.to_string())?;
        let params = QaoaParams::single(rng.gen_range(0.0..3.0), rng.gen_range(0.0..1.5));
        let circuit = qaoa_circuit(&inst, &params);
        let cfg = SimConfig::default().with_seed(i);
        let edge = edge_observable(&circuit, inst.edges()[0]);
        let net = TensorNetwork::from_circuit(&edge);
        let p = plan(&net, &cfg).map_err(|e| e.to_string())?;
        let exec = net
            .execute(&p.order, &cfg.contract)
            .map_err(|e| e.to_string())?;
        if !exec.value.re.is_finite() {
            return Err(format!("circuit {i}: non-finite value"));
        }
        widths.push(p.width.unwrap() as f64);
        flops.push(exec.cost.flops as f64);
    }
    let rho = spearman(&widths, &flops);
    let (lo, hi) = widths
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    check(
        rho > 0.5,
        format!(
            "50 circuits at n=14, k in 3..=5, widths {lo}..={hi}, spearman {rho:.3} (need > 0.5)"
        ),
    )
}

/// The default cap, lowered so that two operands and a result of the capped
/// rank fit in available memory. Past this the process would abort instead of
/// reporting.
fn memory_rank_cap() -> usize {
    let available = std::fs::read_to_string("/proc/meminfo").ok().and_then(|m| {
        m.lines()
            .find(|l| l.starts_with("MemAvailable:"))
            .and_then(|l| l.split_whitespace().nth(1)?.parse::<u64>().ok())
            .map(|kib| kib * 1024)
    });
    match available {
        Some(bytes) => {
            let mut r = 0;
            while 3 * 16 * 4u64.pow(r as u32 + 1) <= bytes && r + 1 <= DEFAULT_RANK_CAP {
                r += 1;
            }
            r
        }
        None => DEFAULT_RANK_CAP,
    }
}

fn scalability_smoke() -> Outcome {
    let start = Instant::now();
    let inst = ring_plus_chords(100, 1).map_err(|e| e.to_string())?;
    let circuit = qaoa_circuit(&inst, &QaoaParams::single(0.4, 0.3));
    let edge = inst.edges()[0];
    let net = TensorNetwork::from_circuit(&edge_observable(&circuit, edge));
    let p = line_graph_plan(&net, Budget::Seconds(180.0), 1).map_err(|e| e.to_string())?;
    let planned = format!(
        "{} wires, plan width {}, predicted peak rank {}, planned in {:.0}s",
        net.wire_count(),
        p.width.unwrap(),
        p.predicted_peak_rank,
        start.elapsed().as_secs_f64()
    );
    let cap = memory_rank_cap();
    let planned = format!("{planned}, rank cap {cap}");
    let opts = ContractOptions {
        rank_cap: cap,
        ..ContractOptions::default()
    };
    match net.execute(&p.order, &opts) {
        Ok(exec) if exec.value.re.is_finite() => within(
            Duration::from_secs(1800),
            start,
            format!("{planned}, <Z{}Z{}> = {:.6}", edge.0, edge.1, exec.value.re),
        ),
        Ok(exec) => Err(format!("{planned}, non-finite value {}", exec.value)),
        Err(e) => Err(format!("{planned}; {e}")),
    }
}

fn ordering_exactness() -> Outcome {
    let start = Instant::now();
    let budget = Budget::Restarts(1000);
    let mut checked = 0;
    let mut test = |g: &SimpleGraph, seed: u64| -> Result<(), String> {
        let exact = brute_force_treewidth(g);
        let best = anytime_ordering(g, budget, seed);
        let td = TreeDecomposition::from_ordering(g, &best.ordering);
        td.validate(g)
            .map_err(|e| format!("{:?}: {e}", g.edges()))?;
        if best.width != exact
            || td.width() != exact
            || treewidth_upper_bound(&best.ordering, g) != exact
        {
            return Err(format!(
                "{:?}: anytime {} vs exact {exact}",
                g.edges(),
                best.width
            ));
        }
        checked += 1;
        Ok(())
    };
    // every labelled connected graph up to 5 vertices
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = SimpleGraph::from_edges(n, &edges).unwrap();
            if g.is_connected() {
                test(&g, mask as u64)?;
            }
        }
    }
    // 500 random connected graphs on 6 or 7 vertices
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..500u64 {
        let n = rng.gen_range(6..=7);
        let extra = rng.gen_range(0.0..0.9);
        test(&random_connected_graph(&mut rng, n, extra), i)?;
    }
    let mut families = Vec::new();
    for n in 2..=7 {
        let tree = random_connected_graph(&mut rng, n, 0.0);
        families.push((
            format!("tree {n}"),
            anytime_ordering(&tree, budget, 0).width,
            1,
        ));
        families.push((
            format!("K{n}"),
            anytime_ordering(&SimpleGraph::complete(n), budget, 0).width,
            n - 1,
        ));
        if n >= 3 {
            families.push((
                format!("C{n}"),
                anytime_ordering(&SimpleGraph::cycle(n), budget, 0).width,
                2,
            ));
        }
    }
    if let Some((name, got, want)) = families.iter().find(|(_, g, w)| g != w) {
        return Err(format!("{name}: width {got}, expected {want}"));
    }
    Ok(format!(
        "{checked} graphs match brute force, trees/cycles/complete exact, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("gate-tensor fidelity", gate_fidelity),
        ("oracle equivalence", oracle_equivalence),
        ("plan independence", plan_independence),
        ("trace preservation", trace_preservation),
        ("QAOA sanity", qaoa_sanity),
        ("answer-string harness", answer_string_harness),
        ("treewidth/cost trend", treewidth_trend),
        ("scalability smoke test", scalability_smoke),
        ("ordering exactness", ordering_exactness),
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(d) => println!("criterion {n} ({name}): PASS {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL {d}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
