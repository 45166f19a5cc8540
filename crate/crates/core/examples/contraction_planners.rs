//! Compare the line-graph planner at several budgets with the stochastic
//! planner on one QAOA edge network, then execute the cheapest plan.
//!
//! cargo run --release --example contraction_planners -- [n] [k] [p]

use std::time::Instant;

use tncircuit::network::TensorNetwork;
use tncircuit::ordering::{default_max_rejections, line_graph_plan, stochastic_plan, Budget};
use tncircuit::qaoa::{edge_observable, qaoa_circuit, random_regular_graph, QaoaParams};
use tncircuit::tensor::ContractOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>());
    let n = args.next().transpose()?.unwrap_or(12);
    let k = args.next().transpose()?.unwrap_or(3);
    let p = args.next().transpose()?.unwrap_or(2);
    let inst = random_regular_graph(n, k, 1)?;
    let params = QaoaParams::new(vec![0.6; p], vec![0.35; p])?;
    let circuit = qaoa_circuit(&inst, &params);
    let edge = inst.edges()[0];
    let net = TensorNetwork::from_circuit(&edge_observable(&circuit, edge));
    println!(
        "{n} vertices, degree {k}, {p} rounds: {} nodes, {} wires",
        net.node_count(),
        net.wire_count()
    );

    let mut plans = Vec::new();
    for restarts in [1, 10, 100] {
        let start = Instant::now();
        let plan = line_graph_plan(&net, Budget::Restarts(restarts), 7)?;
        println!(
            "lg {restarts:>4} restarts: width {:>2}  peak rank {:>2}  flops {:>14}  ({:.2}s)",
            plan.width.unwrap(),
            plan.predicted_peak_rank,
            plan.predicted_flops,
            start.elapsed().as_secs_f64()
        );
        plans.push(plan);
    }
    for seed in 0..3 {
        let plan = stochastic_plan(&net, default_max_rejections(&net), seed)?;
        println!(
            "stoch seed {seed}:    width {:>2}  peak rank {:>2}  flops {:>14}",
            plan.width.unwrap(),
            plan.predicted_peak_rank,
            plan.predicted_flops
        );
        plans.push(plan);
    }

    let best = plans.iter().min_by_key(|p| p.predicted_flops).unwrap();
    let start = Instant::now();
    let out = net.execute(&best.order, &ContractOptions::default())?;
    println!(
        "cheapest plan: <Z{}Z{}> = {:.10} in {:.2}s, {} flops executed",
        edge.0,
        edge.1,
        out.value.re,
        start.elapsed().as_secs_f64(),
        out.cost.flops
    );
    Ok(())
}
