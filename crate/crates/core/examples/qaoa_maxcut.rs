//! Depth-1 QAOA on a random 3-regular graph: scan the angles on a grid and
//! compare the best expected cut with the exact maximum cut.
//!
//! cargo run --release --example qaoa_maxcut -- [n] [grid steps]

use tncircuit::engine::SimConfig;
use tncircuit::qaoa::{grid_scan, max_cut_brute_force, random_regular_graph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>());
    let n = args.next().transpose()?.unwrap_or(8);
    let steps = args.next().transpose()?.unwrap_or(9);
    let inst = random_regular_graph(n, 3, 2024)?;
    println!("graph:\n{}", inst.to_text());

    let best = grid_scan(&inst, steps, &SimConfig::default())?;
    let (max_cut, witness) = max_cut_brute_force(&inst);
    println!(
        "best grid point gamma = {:.4}, beta = {:.4}: <C> = {:.6}",
        best.gamma, best.beta, best.value
    );
    println!(
        "maximum cut {max_cut} (e.g. {witness}), ratio {:.4}",
        best.value / max_cut as f64
    );
    println!(
        "random guessing gives {:.1}",
        inst.edges().len() as f64 / 2.0
    );
    Ok(())
}
