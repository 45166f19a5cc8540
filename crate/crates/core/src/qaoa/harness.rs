//! Random QAOA-like unitaries `Π_j exp(i beta_j Σ X) exp(i gamma_j D_j)`
//! applied to the uniform superposition, used to score the answer-string
//! heuristic against the exact distribution.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::answer::{estimate_answer_string, AnswerError, AnswerString, DistributionBackend};
use crate::circuit::{CMatrix, Circuit, CustomGate, Gate};
use crate::oracle::{DenseState, OracleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Answer(#[from] AnswerError),
}

/// One round: the diagonal of `D_j` and its two angles.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub diagonal: Vec<u64>,
    pub beta: f64,
    pub gamma: f64,
}

/// Draws `p` rounds for `n` qubits with diagonal entries in `1..=n*m`.
pub fn draw_layers(n: usize, m: usize, p: usize, rng: &mut impl Rng) -> Vec<Layer> {
    let top = (n * m).max(1) as u64;
    (0..p)
        .map(|_| Layer {
            diagonal: (0..1usize << n).map(|_| rng.gen_range(1..=top)).collect(),
            beta: rng.gen_range(0.0..=PI),
            gamma: rng.gen_range(0.0..=2.0 * PI),
        })
        .collect()
}

fn x_rotation(beta: f64) -> CMatrix {
    let (c, s) = (
        Complex64::new(beta.cos(), 0.0),
        Complex64::new(0.0, beta.sin()),
    );
    CMatrix::new(2, vec![c, s, s, c])
}

/// Exact output state, built in the dense oracle.
pub fn harness_state(n: usize, layers: &[Layer]) -> Result<DenseState, OracleError> {
    let mut state = DenseState::zero_state(n)?;
    let h = Gate::H.unitary().unwrap();
    for q in 0..n {
        state.apply_unitary(&[q], &h);
    }
    // the last factor of the product acts first
    for layer in layers.iter().rev() {
        let phases: Vec<Complex64> = layer
            .diagonal
            .iter()
            .map(|&d| Complex64::from_polar(1.0, layer.gamma * d as f64))
            .collect();
        state.apply_full_diagonal(&phases);
        let rx = x_rotation(layer.beta);
        for q in 0..n {
            state.apply_unitary(&[q], &rx);
        }
    }
    Ok(state)
}

/// Per-qubit offsets `a_q` with `D(s) = D(0) + Σ_q a_q s_q`, if they exist.
pub fn separable_offsets(n: usize, diagonal: &[u64]) -> Option<Vec<i64>> {
    let d0 = diagonal[0] as i64;
    let offsets: Vec<i64> = (0..n)
        .map(|q| diagonal[1 << (n - 1 - q)] as i64 - d0)
        .collect();
    let additive = diagonal.iter().enumerate().all(|(s, &d)| {
        let sum: i64 = (0..n)
            .filter(|q| (s >> (n - 1 - q)) & 1 == 1)
            .map(|q| offsets[q])
            .sum();
        d as i64 == d0 + sum
    });
    additive.then_some(offsets)
}

/// The same unitary as a gate circuit, when every `D_j` is separable.
/// Global phases are dropped.
pub fn separable_circuit(n: usize, layers: &[Layer]) -> Option<Circuit> {
    let mut c = Circuit::new(n).ok()?;
    for q in 0..n {
        c.push(Gate::H, &[q]).unwrap();
    }
    for (j, layer) in layers.iter().enumerate().rev() {
        let offsets = separable_offsets(n, &layer.diagonal)?;
        for (q, &a) in offsets.iter().enumerate() {
            let phase = CMatrix::diagonal(&[
                Complex64::new(1.0, 0.0),
                Complex64::from_polar(1.0, layer.gamma * a as f64),
            ]);
            let gate = CustomGate::unitary(&format!("D{j}Q{q}"), phase).ok()?;
            c.push(Gate::Custom(Arc::new(gate)), &[q]).unwrap();
        }
        for q in 0..n {
            c.push(Gate::Rx(-2.0 * layer.beta), &[q]).unwrap();
        }
    }
    Some(c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    /// Strings strictly more probable than the answer.
    pub rank: usize,
    /// `‖p' - p‖₁` against the product-state distribution.
    pub l1: f64,
    pub answer: AnswerString,
}

/// Scores an answer string against the exact distribution.
pub fn score(probabilities: &[f64], answer: &AnswerString) -> (usize, f64) {
    let p_out = probabilities[answer.bits.index()];
    let rank = probabilities.iter().filter(|&&p| p > p_out).count();
    let l1 = answer
        .product_distribution()
        .iter()
        .zip(probabilities)
        .map(|(a, b)| (a - b).abs())
        .sum();
    (rank, l1)
}

pub fn run_trial(
    n: usize,
    layers: &[Layer],
    trial: usize,
    seed: u64,
) -> Result<TrialResult, HarnessError> {
    let probabilities = harness_state(n, layers)?.distribution();
    let answer = estimate_answer_string(&mut DistributionBackend::new(&probabilities), seed)?;
    let (rank, l1) = score(&probabilities, &answer);
    Ok(TrialResult {
        trial,
        rank,
        l1,
        answer,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarnessReport {
    pub num_qubits: usize,
    pub results: Vec<TrialResult>,
}

impl HarnessReport {
    pub fn fraction_rank_below(&self, limit: f64) -> f64 {
        self.fraction(|r| (r.rank as f64) < limit)
    }

    pub fn fraction_l1_below(&self, limit: f64) -> f64 {
        self.fraction(|r| r.l1 < limit)
    }

    fn fraction(&self, pred: impl Fn(&TrialResult) -> bool) -> f64 {
        if self.results.is_empty() {
            return 0.0;
        }
        self.results.iter().filter(|r| pred(r)).count() as f64 / self.results.len() as f64
    }

    /// Counts per rank, index = rank.
    pub fn rank_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; 1 << self.num_qubits];
        for r in &self.results {
            hist[r.rank] += 1;
        }
        hist
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,rank,l1\n");
        for r in &self.results {
            writeln!(out, "{},{},{}", r.trial, r.rank, r.l1).unwrap();
        }
        out
    }
}

/// Runs `trials` independent trials; trial `t` draws from stream `t` of the
/// seeded generator.
pub fn product_state_harness(
    n: usize,
    m: usize,
    p: usize,
    trials: usize,
    seed: u64,
) -> Result<HarnessReport, HarnessError> {
    let results = (0..trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let layers = draw_layers(n, m, p, &mut rng);
            run_trial(n, &layers, t, rng.gen())
        })
        .collect::<Result<_, _>>()?;
    Ok(HarnessReport {
        num_qubits: n,
        results,
    })
}
