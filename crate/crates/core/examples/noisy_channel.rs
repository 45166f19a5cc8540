//! Kraus channels in the network: a GHZ state under depolarizing noise, plus a
//! custom channel declared in the circuit text format.
//!
//! cargo run --example noisy_channel

use std::sync::Arc;

use tncircuit::circuit::{parse_circuit, Circuit, CustomGate, Gate, KrausChannel, Measurement};
use tncircuit::engine::{expectation, SimConfig};
use tncircuit::oracle::oracle_expectation;

fn ghz_with_noise(p: f64) -> Result<Circuit, Box<dyn std::error::Error>> {
    let noise = Gate::Custom(Arc::new(CustomGate::kraus(
        "DEPOL",
        KrausChannel::depolarizing(p)?,
    )));
    let mut c = Circuit::new(3)?;
    c.push(Gate::H, &[0])?;
    c.push(Gate::Cnot, &[0, 1])?;
    c.push(Gate::Cnot, &[1, 2])?;
    for q in 0..3 {
        c.push(noise.clone(), &[q])?;
        c.measure(q, Measurement::X)?;
    }
    Ok(c)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("<X0 X1 X2> on a GHZ state with depolarizing noise on every qubit");
    for p in [0.0, 0.05, 0.1, 0.2, 0.5] {
        let c = ghz_with_noise(p)?;
        let tn = expectation(&c, &SimConfig::default())?.value.re;
        let dense = oracle_expectation(&c)?.re;
        println!("p = {p:<4}  network {tn:.10}  oracle {dense:.10}");
    }

    // full dephasing written out as two Kraus operators
    let text = "\
1
KRAUS DEPHASE 1 2
1,0 0,0 0,0 0,0
0,0 0,0 0,0 1,0
H 0
DEPHASE 0
MEASX 0
";
    let c = parse_circuit(text)?;
    println!(
        "<X> after full dephasing: {:.3e}",
        expectation(&c, &SimConfig::default())?.value.re
    );
    Ok(())
}
