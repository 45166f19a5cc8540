//! Score the answer-string heuristic on random QAOA-like unitaries: how many
//! strings beat the answer, and how far the implied product distribution is
//! from the true one.
//!
//! cargo run --release --example product_state_harness -- [trials]

use tncircuit::qaoa::product_state_harness;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(1000);
    let (n, m, p) = (6, 10, 2);
    let report = product_state_harness(n, m, p, trials, 42)?;

    let hist = report.rank_histogram();
    println!("rank  trials");
    for (rank, count) in hist.iter().enumerate().take(12) {
        println!("{rank:>4}  {count}");
    }
    let top = 0.1 * (1u32 << n) as f64;
    println!(
        "answer within the top 10% ({top:.1} strings): {:.3}",
        report.fraction_rank_below(top - 1.0)
    );
    let mut l1: Vec<f64> = report.results.iter().map(|r| r.l1).collect();
    l1.sort_by(f64::total_cmp);
    println!(
        "l1 distance to the product distribution: median {:.3}, 10th percentile {:.3}, below 0.15 {:.3}",
        l1[l1.len() / 2],
        l1[l1.len() / 10],
        report.fraction_l1_below(0.15)
    );
    Ok(())
}
