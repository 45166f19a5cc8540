use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{MergeState, TensorNetwork};
use crate::tensor::WireId;

/// One accepted contraction of the stochastic planner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticStep {
    pub wire: WireId,
    /// Other wires between the same pair, contracted together with `wire`.
    pub absorbed: Vec<WireId>,
    /// Threshold in force when the contraction was accepted.
    pub threshold: i64,
    /// `rank(C) - max(rank(A), rank(B))`.
    pub cost: i64,
}

/// Random-wire contraction with a relaxing rank threshold.
///
/// A random live wire is accepted when contracting it grows the larger
/// endpoint's rank by at most the threshold. The threshold starts at -1, is
/// raised by one after more than `max_rejections` consecutive rejections and
/// drops back to -1 after every acceptance.
pub fn stochastic_steps(
    net: &TensorNetwork,
    max_rejections: usize,
    seed: u64,
) -> Vec<StochasticStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = MergeState::new(net);
    let mut live: Vec<usize> = (0..net.wire_count()).collect();
    let endpoints = net.endpoints();
    let mut threshold: i64 = -1;
    let mut rejections = 0usize;
    let mut steps = Vec::new();
    while !live.is_empty() {
        let w = live[rng.gen_range(0..live.len())];
        let (u, v) = endpoints[w];
        let step = state
            .preview(u, v)
            .expect("live wires join distinct super-nodes");
        let cost = step.rank_out as i64 - step.rank_a.max(step.rank_b) as i64;
        if cost <= threshold {
            state.merge(u, v);
            let mut absorbed = Vec::new();
            live.retain(|&x| {
                let (a, b) = endpoints[x];
                let keep = state.find(a) != state.find(b);
                if !keep && x != w {
                    absorbed.push(net.wires()[x]);
                }
                keep
            });
            steps.push(StochasticStep {
                wire: net.wires()[w],
                absorbed,
                threshold,
                cost,
            });
            rejections = 0;
            threshold = -1;
        } else {
            rejections += 1;
            if rejections > max_rejections {
                threshold += 1;
                rejections = 0;
            }
        }
    }
    steps
}
