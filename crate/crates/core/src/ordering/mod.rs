//! Contraction planning.
//!
//! Two planners produce a [`ContractionPlan`] for a [`TensorNetwork`]:
//!
//! * the line-graph planner finds an elimination ordering of the network's
//!   line graph (one vertex per wire) and eliminates wires in that order;
//! * the stochastic planner contracts random wires whose rank growth stays
//!   under a threshold that relaxes after repeated rejections.

mod elimination;
mod graph;
mod stochastic;

use thiserror::Error;

pub use elimination::{
    anytime_ordering, anytime_ordering_scored, induced_width, min_fill_ordering,
    treewidth_upper_bound, AnytimeResult, Budget, DecompositionError, EliminationOrdering,
    OrderingError, TreeDecomposition,
};
pub use graph::{line_graph_of_edges, GraphError, SimpleGraph};
pub use stochastic::{stochastic_steps, StochasticStep};

use crate::network::{NetworkError, TensorNetwork};
use crate::tensor::WireId;

/// Default number of anytime restarts for the line-graph planner.
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("ordering does not match the network's wires: {0}")]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// An ordered sequence of wire eliminations with its predicted cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionPlan {
    pub order: Vec<WireId>,
    pub predicted_flops: u128,
    pub predicted_peak_rank: usize,
    /// Induced width of the ordering on the line graph, when one defines the plan.
    pub width: Option<usize>,
}

impl ContractionPlan {
    /// Plans `order` as given, predicting its cost on the abstract graph.
    pub fn from_order(net: &TensorNetwork, order: Vec<WireId>) -> Result<Self, PlanError> {
        let cost = net.simulate_plan(&order)?;
        Ok(ContractionPlan {
            order,
            predicted_flops: cost.flops,
            predicted_peak_rank: cost.peak_rank,
            width: None,
        })
    }
}

impl TensorNetwork {
    /// Line graph of the network: one vertex per wire in [`TensorNetwork::wires`] order.
    pub fn line_graph(&self) -> SimpleGraph {
        line_graph_of_edges(self.node_count(), self.endpoints())
    }
}

/// Reads a line-graph elimination ordering as a wire elimination order.
pub fn plan_from_ordering(
    net: &TensorNetwork,
    ordering: &EliminationOrdering,
) -> Result<ContractionPlan, PlanError> {
    ordering.validate(net.wire_count())?;
    let order: Vec<WireId> = ordering.0.iter().map(|&i| net.wires()[i]).collect();
    let mut plan = ContractionPlan::from_order(net, order)?;
    plan.width = Some(induced_width(&net.line_graph(), ordering));
    Ok(plan)
}

/// Line-graph planner: anytime search over line-graph orderings ranked by
/// width, then predicted FLOPs.
pub fn line_graph_plan(
    net: &TensorNetwork,
    budget: Budget,
    seed: u64,
) -> Result<ContractionPlan, PlanError> {
    let lg = net.line_graph();
    let best = anytime_ordering_scored(&lg, budget, seed, |ord| {
        let order: Vec<WireId> = ord.0.iter().map(|&i| net.wires()[i]).collect();
        net.simulate_plan(&order)
            .map(|c| c.flops)
            .unwrap_or(u128::MAX)
    });
    plan_from_ordering(net, &best.ordering)
}

/// Default rejection patience of the stochastic planner.
pub fn default_max_rejections(net: &TensorNetwork) -> usize {
    (2 * net.wire_count()).max(1)
}

/// Stochastic planner. The plan lists each accepted wire followed by the
/// parallel wires it absorbed, so it is a permutation of all wires.
pub fn stochastic_plan(
    net: &TensorNetwork,
    max_rejections: usize,
    seed: u64,
) -> Result<ContractionPlan, PlanError> {
    let positions = stochastic_steps(net, max_rejections.max(1), seed)
        .into_iter()
        .flat_map(|s| std::iter::once(s.wire).chain(s.absorbed))
        .map(|w| {
            net.wire_position(w)
                .expect("planned wires belong to the network")
        })
        .collect();
    plan_from_ordering(net, &EliminationOrdering(positions))
}
