//! Contract a Bell-pair circuit with both planners and check it against the
//! dense density-matrix oracle.
//!
//! cargo run --example bell_expectation

use tncircuit::circuit::parse_circuit;
use tncircuit::engine::{expectation, PlannerKind, SimConfig};
use tncircuit::oracle::oracle_expectation;

const BELL: &str = "\
2
H 0
CNOT 0 1
MEASZ 0
MEASZ 1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circuit = parse_circuit(BELL)?;
    let reference = oracle_expectation(&circuit)?;
    println!("oracle <Z0 Z1> = {:.12}", reference.re);
    for planner in [PlannerKind::LineGraph, PlannerKind::Stochastic] {
        let cfg = SimConfig::default().with_planner(planner);
        let e = expectation(&circuit, &cfg)?;
        println!(
            "{planner:>5}: <Z0 Z1> = {:.12}  flops {}  peak rank {}  width {:?}",
            e.value.re, e.cost.flops, e.cost.peak_rank, e.plan.width
        );
    }
    // the same state measured in X: also perfectly correlated
    let x = parse_circuit(&BELL.replace("MEASZ", "MEASX"))?;
    println!(
        "<X0 X1> = {:.12}",
        expectation(&x, &SimConfig::default())?.value.re
    );
    Ok(())
}
