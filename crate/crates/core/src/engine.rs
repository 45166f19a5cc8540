//! Circuit to scalar: build the network, plan it, execute the plan.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateAction};
use crate::network::{NetworkError, TensorNetwork};
use crate::ordering::{
    default_max_rejections, line_graph_plan, stochastic_plan, Budget, ContractionPlan, PlanError,
    DEFAULT_RESTARTS,
};
use crate::tensor::{ContractOptions, ContractionCost};

/// Largest imaginary part tolerated on a Hermitian measurement.
pub const IMAG_TOL: f64 = 1e-8;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum PlannerKind {
    #[default]
    LineGraph,
    Stochastic,
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lg" => Ok(PlannerKind::LineGraph),
            "stoch" => Ok(PlannerKind::Stochastic),
            other => Err(format!("unknown planner `{other}` (expected lg or stoch)")),
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlannerKind::LineGraph => "lg",
            PlannerKind::Stochastic => "stoch",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub planner: PlannerKind,
    pub seed: u64,
    /// Search budget of the line-graph planner.
    pub budget: Budget,
    /// Rejection patience of the stochastic planner; `None` picks the default.
    pub max_rejections: Option<usize>,
    pub contract: ContractOptions,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            planner: PlannerKind::LineGraph,
            seed: 0,
            budget: Budget::Restarts(DEFAULT_RESTARTS),
            max_rejections: None,
            contract: ContractOptions::default(),
        }
    }
}

impl SimConfig {
    pub fn with_planner(mut self, planner: PlannerKind) -> Self {
        self.planner = planner;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("expectation of a Hermitian measurement has imaginary part {0:e}")]
    ImaginaryPart(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub value: Complex64,
    pub cost: ContractionCost,
    pub plan: ContractionPlan,
}

/// Plans `net` with the configured planner.
pub fn plan(net: &TensorNetwork, cfg: &SimConfig) -> Result<ContractionPlan, PlanError> {
    match cfg.planner {
        PlannerKind::LineGraph => line_graph_plan(net, cfg.budget, cfg.seed),
        PlannerKind::Stochastic => {
            let m = cfg
                .max_rejections
                .unwrap_or_else(|| default_max_rejections(net));
            stochastic_plan(net, m, cfg.seed)
        }
    }
}

/// Raw superoperators may map Hermitian states to non-Hermitian ones.
fn preserves_hermiticity(circuit: &Circuit) -> bool {
    circuit.ops().iter().all(|op| match &op.gate {
        Gate::Custom(g) => !matches!(g.action, GateAction::Superoperator(_)),
        _ => true,
    })
}

/// Contracts the circuit's network to its expectation value.
pub fn expectation(circuit: &Circuit, cfg: &SimConfig) -> Result<Expectation, SimError> {
    let net = TensorNetwork::from_circuit(circuit);
    let plan = plan(&net, cfg)?;
    let out = net.execute(&plan.order, &cfg.contract)?;
    if preserves_hermiticity(circuit) && out.value.im.abs() > IMAG_TOL {
        return Err(SimError::ImaginaryPart(out.value.im));
    }
    Ok(Expectation {
        value: out.value,
        cost: out.cost,
        plan,
    })
}
