//! Max-Cut QAOA circuits, the answer-string heuristic and its validation
//! harness.

mod answer;
mod graphs;
mod harness;
mod maxcut;

pub use answer::{
    answer_string_for_circuit, estimate_answer_string, AnswerError, AnswerStep, AnswerString,
    DistributionBackend, NetworkBackend, PrefixProbability, TIE_TOL, VANISHING_TOL,
};
pub use graphs::{random_regular_graph, ring_plus_chords, InstanceError, MaxCutInstance};
pub use harness::{
    draw_layers, harness_state, product_state_harness, run_trial, score, separable_circuit,
    separable_offsets, HarnessError, HarnessReport, Layer, TrialResult,
};
pub use maxcut::{
    cut_value, edge_correlations, edge_observable, expectation_of_cut, grid_scan,
    max_cut_brute_force, qaoa_circuit, BitString, EdgeCorrelations, GridPoint, QaoaError,
    QaoaParams,
};
