//! Elimination orderings: min-fill, the anytime restart search, induced width
//! and the tree decomposition an ordering defines.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::graph::SimpleGraph;

/// A permutation of a graph's vertices, eliminated first to last.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EliminationOrdering(pub Vec<usize>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderingError {
    #[error("ordering has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("ordering is not a permutation (entry {0})")]
    NotPermutation(usize),
    #[error("malformed ordering token {0:?}")]
    Malformed(String),
}

impl EliminationOrdering {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks that this is a permutation of `0..n`.
    pub fn validate(&self, n: usize) -> Result<(), OrderingError> {
        if self.0.len() != n {
            return Err(OrderingError::WrongLength {
                expected: n,
                got: self.0.len(),
            });
        }
        let mut seen = vec![false; n];
        for &v in &self.0 {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(OrderingError::NotPermutation(v));
            }
        }
        Ok(())
    }

    /// Whitespace-separated indices on one line.
    pub fn serialize(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        parts.join(" ")
    }

    pub fn parse(text: &str) -> Result<Self, OrderingError> {
        text.split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| OrderingError::Malformed(t.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(EliminationOrdering)
    }
}

/// Working copy of a graph under vertex elimination.
struct Eliminator {
    nbrs: Vec<BTreeSet<usize>>,
}

impl Eliminator {
    fn new(g: &SimpleGraph) -> Self {
        Eliminator {
            nbrs: (0..g.vertex_count())
                .map(|v| g.neighbors(v).collect())
                .collect(),
        }
    }

    fn fill_in(&self, v: usize) -> usize {
        let list: Vec<usize> = self.nbrs[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                if !self.nbrs[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    }

    /// Eliminates `v`, returning its neighbours at elimination time.
    fn eliminate(&mut self, v: usize) -> Vec<usize> {
        let list: Vec<usize> = std::mem::take(&mut self.nbrs[v]).into_iter().collect();
        for &a in &list {
            self.nbrs[a].remove(&v);
        }
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                self.nbrs[a].insert(b);
                self.nbrs[b].insert(a);
            }
        }
        list
    }
}

/// Width of the elimination: the largest neighbourhood at elimination time.
pub fn induced_width(g: &SimpleGraph, ordering: &EliminationOrdering) -> usize {
    let mut e = Eliminator::new(g);
    ordering
        .0
        .iter()
        .map(|&v| e.eliminate(v).len())
        .max()
        .unwrap_or(0)
}

/// Treewidth upper bound certified by an elimination ordering.
pub fn treewidth_upper_bound(ordering: &EliminationOrdering, g: &SimpleGraph) -> usize {
    induced_width(g, ordering)
}

fn rng_for(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// One greedy elimination. With probability `noise` a step picks a uniformly
/// random vertex instead of the min-fill choice. Returns `None` as soon as the
/// width exceeds `cutoff`.
fn greedy(
    g: &SimpleGraph,
    rng: &mut ChaCha8Rng,
    noise: f64,
    cutoff: Option<usize>,
) -> Option<(EliminationOrdering, usize)> {
    let n = g.vertex_count();
    let mut e = Eliminator::new(g);
    let mut alive = vec![true; n];
    let mut fill: Vec<usize> = (0..n).map(|v| e.fill_in(v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut width = 0;
    let mut ties = Vec::new();
    let mut stamp = vec![usize::MAX; n];
    for step in 0..n {
        let pick = if noise > 0.0 && rng.gen::<f64>() < noise {
            let k = rng.gen_range(0..n - step);
            (0..n).filter(|&v| alive[v]).nth(k).unwrap()
        } else {
            ties.clear();
            let mut best = (usize::MAX, usize::MAX);
            for v in (0..n).filter(|&v| alive[v]) {
                let key = (fill[v], e.nbrs[v].len());
                if key < best {
                    best = key;
                    ties.clear();
                }
                if key == best {
                    ties.push(v);
                }
            }
            if ties.len() == 1 {
                ties[0]
            } else {
                ties[rng.gen_range(0..ties.len())]
            }
        };
        let nbrs = e.eliminate(pick);
        alive[pick] = false;
        order.push(pick);
        width = width.max(nbrs.len());
        if cutoff.is_some_and(|c| width > c) {
            return None;
        }
        // fill counts change only within distance two of the eliminated vertex
        for &a in &nbrs {
            if stamp[a] != step {
                stamp[a] = step;
                fill[a] = e.fill_in(a);
            }
            let second: Vec<usize> = e.nbrs[a].iter().copied().collect();
            for b in second {
                if stamp[b] != step {
                    stamp[b] = step;
                    fill[b] = e.fill_in(b);
                }
            }
        }
    }
    Some((EliminationOrdering(order), width))
}

/// Greedy min-fill: fewest fill edges first, then smallest degree, remaining
/// ties broken uniformly at random under `seed`.
pub fn min_fill_ordering(g: &SimpleGraph, seed: u64) -> EliminationOrdering {
    greedy(g, &mut rng_for(seed, 0), 0.0, None).unwrap().0
}

/// Search budget of the anytime planner.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Budget {
    /// A fixed number of restarts; deterministic for a given seed.
    Restarts(usize),
    /// Wall-clock budget; at least one restart always runs.
    Seconds(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnytimeResult {
    pub ordering: EliminationOrdering,
    pub width: usize,
    pub score: u128,
    pub restarts: usize,
    /// Best width after each restart.
    pub history: Vec<usize>,
}

/// Anytime elimination-ordering search ranked by width alone.
pub fn anytime_ordering(g: &SimpleGraph, budget: Budget, seed: u64) -> AnytimeResult {
    anytime_ordering_scored(g, budget, seed, |_| 0)
}

/// Randomized-restart min-fill. Restart 0 is [`min_fill_ordering`] with the
/// same seed; later restarts perturb the greedy choice. Candidates are ranked
/// by width, then `score`, then the ordering itself.
pub fn anytime_ordering_scored<F>(
    g: &SimpleGraph,
    budget: Budget,
    seed: u64,
    mut score: F,
) -> AnytimeResult
where
    F: FnMut(&EliminationOrdering) -> u128,
{
    let start = Instant::now();
    let deadline = match budget {
        Budget::Seconds(s) => Some(Duration::from_secs_f64(s.max(0.0))),
        Budget::Restarts(_) => None,
    };
    let mut best: Option<(usize, u128, EliminationOrdering)> = None;
    let mut history = Vec::new();
    let mut restart = 0usize;
    loop {
        let more = match (budget, deadline) {
            (Budget::Restarts(r), _) => restart < r.max(1),
            (_, Some(d)) => restart == 0 || start.elapsed() < d,
            _ => unreachable!(),
        };
        if !more {
            break;
        }
        let mut rng = rng_for(seed, restart);
        let noise = if restart == 0 {
            0.0
        } else {
            rng.gen_range(0.0..0.35)
        };
        let cutoff = best.as_ref().map(|b| b.0);
        if let Some((ordering, width)) = greedy(g, &mut rng, noise, cutoff) {
            let s = score(&ordering);
            let candidate = (width, s, ordering);
            if best.as_ref().map_or(true, |b| candidate < *b) {
                best = Some(candidate);
            }
        }
        history.push(best.as_ref().unwrap().0);
        restart += 1;
    }
    let (width, score, ordering) = best.unwrap();
    AnytimeResult {
        ordering,
        width,
        score,
        restarts: restart,
        history,
    }
}

/// Bags with tree edges between bag indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<usize>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("bag tree is not a tree")]
    NotATree,
    #[error("vertex {0} is in no bag")]
    UncoveredVertex(usize),
    #[error("edge ({0}, {1}) is in no bag")]
    UncoveredEdge(usize, usize),
    #[error("bags containing vertex {0} are not connected")]
    RunningIntersection(usize),
}

impl TreeDecomposition {
    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    /// Builds the decomposition induced by eliminating `ordering`: one bag per
    /// vertex holding it and its neighbours at elimination time, attached to the
    /// bag of the earliest-eliminated of those neighbours.
    pub fn from_ordering(g: &SimpleGraph, ordering: &EliminationOrdering) -> Self {
        let n = g.vertex_count();
        let mut position = vec![0; n];
        for (i, &v) in ordering.0.iter().enumerate() {
            position[v] = i;
        }
        let mut e = Eliminator::new(g);
        let mut bags = Vec::with_capacity(n);
        let mut edges = Vec::new();
        let mut roots = Vec::new();
        for (i, &v) in ordering.0.iter().enumerate() {
            let nbrs = e.eliminate(v);
            match nbrs.iter().map(|&u| position[u]).min() {
                Some(parent) => edges.push((i, parent)),
                None => roots.push(i),
            }
            let mut bag: BTreeSet<usize> = nbrs.into_iter().collect();
            bag.insert(v);
            bags.push(bag);
        }
        // components give separate trees with disjoint vertex sets
        for pair in roots.windows(2) {
            edges.push((pair[0], pair[1]));
        }
        TreeDecomposition { bags, edges }
    }

    pub fn validate(&self, g: &SimpleGraph) -> Result<(), DecompositionError> {
        let m = self.bags.len();
        let mut tree = vec![Vec::new(); m];
        for &(a, b) in &self.edges {
            if a >= m || b >= m || a == b {
                return Err(DecompositionError::NotATree);
            }
            tree[a].push(b);
            tree[b].push(a);
        }
        if m > 0 && (self.edges.len() != m - 1 || !reachable(&tree, 0, |_| true).iter().all(|&r| r))
        {
            return Err(DecompositionError::NotATree);
        }
        for v in 0..g.vertex_count() {
            let holders: Vec<usize> = (0..m).filter(|&i| self.bags[i].contains(&v)).collect();
            let Some(&first) = holders.first() else {
                return Err(DecompositionError::UncoveredVertex(v));
            };
            let seen = reachable(&tree, first, |i| self.bags[i].contains(&v));
            if holders.iter().any(|&i| !seen[i]) {
                return Err(DecompositionError::RunningIntersection(v));
            }
        }
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(DecompositionError::UncoveredEdge(u, v));
            }
        }
        Ok(())
    }
}

fn reachable(tree: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; tree.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &tree[x] {
            if !seen[y] && allowed(y) {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}
