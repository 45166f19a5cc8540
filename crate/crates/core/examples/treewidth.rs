//! Elimination orderings: anytime min-fill on a random graph, its tree
//! decomposition, and the line graph of a circuit network.
//!
//! cargo run --example treewidth

use tncircuit::circuit::parse_circuit;
use tncircuit::network::TensorNetwork;
use tncircuit::ordering::{anytime_ordering, Budget, SimpleGraph, TreeDecomposition};
use tncircuit::qaoa::random_regular_graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, g) in [
        ("cycle C8", SimpleGraph::cycle(8)),
        ("complete K6", SimpleGraph::complete(6)),
        ("path P10", SimpleGraph::path(10)),
    ] {
        println!(
            "{name}: width {}",
            anytime_ordering(&g, Budget::Restarts(5), 0).width
        );
    }

    let g = random_regular_graph(30, 3, 11)?.graph;
    let result = anytime_ordering(&g, Budget::Restarts(200), 3);
    println!(
        "random cubic graph on 30 vertices: width {} after {} restarts",
        result.width, result.restarts
    );
    let firsts: Vec<usize> = result.history.iter().take(10).copied().collect();
    println!("best width after each of the first restarts: {firsts:?}");
    println!("ordering: {}", result.ordering.serialize());

    let td = TreeDecomposition::from_ordering(&g, &result.ordering);
    td.validate(&g)?;
    println!(
        "tree decomposition: {} bags, width {}, valid",
        td.bags.len(),
        td.width()
    );

    let net = TensorNetwork::from_circuit(&parse_circuit("3\nH 0\nCNOT 0 1\nCNOT 1 2\nMEASZ 2")?);
    let lg = net.line_graph();
    println!(
        "GHZ network: {} nodes, {} wires, line graph has {} edges, width {}",
        net.node_count(),
        net.wire_count(),
        lg.edge_count(),
        anytime_ordering(&lg, Budget::Restarts(20), 0).width
    );
    Ok(())
}
