use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::BitString;
use crate::circuit::{Circuit, Measurement};
use crate::engine::{plan, SimConfig, SimError};
use crate::network::TensorNetwork;
use crate::ordering::ContractionPlan;
use crate::tensor::ContractionCost;

/// Prefix probabilities below this are treated as zero.
pub const VANISHING_TOL: f64 = 1e-14;
/// `|p0 - 1/2|` at or below this is a tie, broken by the seeded RNG.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnswerError {
    #[error("vanishing branch: prefix {prefix:?} has probability {probability:e}")]
    VanishingBranch { prefix: String, probability: f64 },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Unnormalized probability that the leading qubits read a given prefix.
pub trait PrefixProbability {
    fn num_qubits(&self) -> usize;

    /// Weight of outcomes starting with `prefix`; the empty prefix gives the
    /// total weight.
    fn prefix_weight(&mut self, prefix: &[u8]) -> Result<f64, AnswerError>;

    /// Total weight when it is known without computation.
    fn known_total(&self) -> Option<f64> {
        None
    }
}

/// Contracts the circuit with projectors on the prefix and trace elsewhere.
pub struct NetworkBackend<'a> {
    circuit: &'a Circuit,
    cfg: &'a SimConfig,
    plan: ContractionPlan,
    pub cost: ContractionCost,
    pub contractions: usize,
}

impl<'a> NetworkBackend<'a> {
    /// Plans once: every prefix network has the circuit's shape.
    pub fn new(circuit: &'a Circuit, cfg: &'a SimConfig) -> Result<Self, SimError> {
        let plan = plan(&TensorNetwork::from_circuit(circuit), cfg)?;
        Ok(NetworkBackend {
            circuit,
            cfg,
            plan,
            cost: ContractionCost::default(),
            contractions: 0,
        })
    }

    pub fn plan(&self) -> &ContractionPlan {
        &self.plan
    }
}

impl PrefixProbability for NetworkBackend<'_> {
    fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    fn prefix_weight(&mut self, prefix: &[u8]) -> Result<f64, AnswerError> {
        let mut m = vec![Measurement::Trace; self.num_qubits()];
        for (q, &b) in prefix.iter().enumerate() {
            m[q] = if b == 0 {
                Measurement::Proj0
            } else {
                Measurement::Proj1
            };
        }
        let net = TensorNetwork::from_circuit(&self.circuit.with_measurements(m));
        let out = net
            .execute(&self.plan.order, &self.cfg.contract)
            .map_err(SimError::from)?;
        self.cost.accumulate(out.cost);
        self.contractions += 1;
        Ok(out.value.re)
    }

    fn known_total(&self) -> Option<f64> {
        self.circuit.is_trace_preserving().then_some(1.0)
    }
}

/// Marginals of an explicit distribution over `2^n` strings, qubit 0 most
/// significant.
pub struct DistributionBackend<'a> {
    probabilities: &'a [f64],
    num_qubits: usize,
}

impl<'a> DistributionBackend<'a> {
    pub fn new(probabilities: &'a [f64]) -> Self {
        assert!(probabilities.len().is_power_of_two(), "length must be 2^n");
        DistributionBackend {
            probabilities,
            num_qubits: probabilities.len().trailing_zeros() as usize,
        }
    }
}

impl PrefixProbability for DistributionBackend<'_> {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn prefix_weight(&mut self, prefix: &[u8]) -> Result<f64, AnswerError> {
        let rest = self.num_qubits - prefix.len();
        let head = prefix
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let block = &self.probabilities[head << rest..(head + 1) << rest];
        Ok(block.iter().sum())
    }
}

/// One qubit's decision.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct AnswerStep {
    pub qubit: usize,
    /// Probability of 0 given the bits already fixed.
    pub p0: f64,
    pub p1: f64,
    pub bit: u8,
    pub tie: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnswerString {
    pub bits: BitString,
    pub steps: Vec<AnswerStep>,
    /// Product of the chosen conditional probabilities.
    pub probability: f64,
}

impl AnswerString {
    /// Distribution of the product state with the per-step marginals.
    pub fn product_distribution(&self) -> Vec<f64> {
        let n = self.steps.len();
        (0..1usize << n)
            .map(|i| {
                self.steps
                    .iter()
                    .enumerate()
                    .map(|(q, s)| {
                        if (i >> (n - 1 - q)) & 1 == 0 {
                            s.p0
                        } else {
                            s.p1
                        }
                    })
                    .product()
            })
            .collect()
    }
}

fn prefix_string(bits: &[u8]) -> String {
    BitString(bits.to_vec()).to_string()
}

/// Fixes qubits one at a time to their more likely value given the earlier
/// choices.
pub fn estimate_answer_string(
    backend: &mut dyn PrefixProbability,
    seed: u64,
) -> Result<AnswerString, AnswerError> {
    let n = backend.num_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = match backend.known_total() {
        Some(t) => t,
        None => backend.prefix_weight(&[])?,
    };
    let mut weight = total;
    let mut bits = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    for qubit in 0..n {
        if weight.abs() < VANISHING_TOL {
            return Err(AnswerError::VanishingBranch {
                prefix: prefix_string(&bits),
                probability: weight,
            });
        }
        bits.push(0);
        let w0 = backend.prefix_weight(&bits)?;
        bits.pop();
        let p0 = (w0 / weight).clamp(0.0, 1.0);
        let p1 = 1.0 - p0;
        let tie = (p0 - 0.5).abs() <= TIE_TOL;
        let bit = if tie {
            rng.gen_range(0..2u8)
        } else if p0 > 0.5 {
            0
        } else {
            1
        };
        weight = if bit == 0 { w0 } else { weight - w0 };
        bits.push(bit);
        steps.push(AnswerStep {
            qubit,
            p0,
            p1,
            bit,
            tie,
        });
    }
    if weight.abs() < VANISHING_TOL {
        return Err(AnswerError::VanishingBranch {
            prefix: prefix_string(&bits),
            probability: weight,
        });
    }
    Ok(AnswerString {
        bits: BitString(bits),
        probability: weight / total,
        steps,
    })
}

/// Answer string of a circuit by network contraction.
pub fn answer_string_for_circuit(
    circuit: &Circuit,
    cfg: &SimConfig,
) -> Result<AnswerString, AnswerError> {
    let mut backend = NetworkBackend::new(circuit, cfg)?;
    estimate_answer_string(&mut backend, cfg.seed)
}
