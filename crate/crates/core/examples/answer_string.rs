//! Estimate a likely output string of a QAOA circuit one qubit at a time and
//! score it as a cut.
//!
//! cargo run --release --example answer_string

use tncircuit::engine::SimConfig;
use tncircuit::qaoa::{
    answer_string_for_circuit, cut_value, max_cut_brute_force, qaoa_circuit, random_regular_graph,
    QaoaParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = random_regular_graph(10, 3, 5)?;
    // reasonable depth-1 angles for cubic graphs
    let circuit = qaoa_circuit(&inst, &QaoaParams::single(0.616, 0.393));
    let cfg = SimConfig::default().with_seed(1);
    let answer = answer_string_for_circuit(&circuit, &cfg)?;
    for s in &answer.steps {
        let tie = if s.tie { "  (tie)" } else { "" };
        println!(
            "qubit {}: p0 {:.4}  p1 {:.4} -> {}{tie}",
            s.qubit, s.p0, s.p1, s.bit
        );
    }
    let (best, _) = max_cut_brute_force(&inst);
    println!(
        "answer {} with probability {:.5}, cuts {} of {} edges (maximum {best})",
        answer.bits,
        answer.probability,
        cut_value(&inst, &answer.bits)?,
        inst.edges().len()
    );
    Ok(())
}
