use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ordering::{GraphError, SimpleGraph};

/// Attempts before random graph generation gives up.
pub const GRAPH_RETRY_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("n * k must be even (n = {n}, k = {k})")]
    Parity { n: usize, k: usize },
    #[error("degree {k} needs more than {n} vertices")]
    DegreeTooLarge { n: usize, k: usize },
    #[error("no valid graph after {0} attempts")]
    RetryCap(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is not {0}-regular")]
    NotRegular(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A Max-Cut problem: a connected simple graph, optionally tagged k-regular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxCutInstance {
    pub graph: SimpleGraph,
    pub regularity: Option<usize>,
}

impl MaxCutInstance {
    pub fn new(graph: SimpleGraph, regularity: Option<usize>) -> Result<Self, InstanceError> {
        let inst = MaxCutInstance { graph, regularity };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if !self.graph.is_connected() {
            return Err(InstanceError::Disconnected);
        }
        if let Some(k) = self.regularity {
            if !self.graph.is_regular(k) {
                return Err(InstanceError::NotRegular(k));
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges()
    }

    /// Graph file: vertex count, then one `u v` edge per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.num_vertices());
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses a graph file; regularity is inferred when all degrees agree.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, message: &str| InstanceError::Parse {
            line,
            message: message.to_string(),
        };
        let (first, head) = lines.next().ok_or_else(|| bad(1, "missing vertex count"))?;
        let n: usize = head
            .parse()
            .map_err(|_| bad(first, "malformed vertex count"))?;
        let mut graph = SimpleGraph::new(n);
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let [u, v] = parts[..] else {
                return Err(bad(line, "expected `u v`"));
            };
            let u: usize = u.parse().map_err(|_| bad(line, "malformed vertex"))?;
            let v: usize = v.parse().map_err(|_| bad(line, "malformed vertex"))?;
            graph
                .add_edge(u, v)
                .map_err(|e| bad(line, &e.to_string()))?;
        }
        let regularity = (n > 0 && graph.is_regular(graph.degree(0))).then(|| graph.degree(0));
        MaxCutInstance::new(graph, regularity)
    }
}

/// Uniform random connected k-regular graph by the pairing model.
///
/// Pairings with self-loops, repeated edges or more than one component are
/// rejected and redrawn.
pub fn random_regular_graph(
    n: usize,
    k: usize,
    seed: u64,
) -> Result<MaxCutInstance, InstanceError> {
    if (n * k) % 2 != 0 {
        return Err(InstanceError::Parity { n, k });
    }
    if k >= n {
        return Err(InstanceError::DegreeTooLarge { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(k)).collect();
    'attempt: for _ in 0..GRAPH_RETRY_CAP {
        stubs.shuffle(&mut rng);
        let mut g = SimpleGraph::new(n);
        for pair in stubs.chunks(2) {
            if g.add_edge(pair[0], pair[1]).is_err() {
                continue 'attempt;
            }
        }
        if g.is_connected() {
            return Ok(MaxCutInstance {
                graph: g,
                regularity: Some(k),
            });
        }
    }
    Err(InstanceError::RetryCap(GRAPH_RETRY_CAP))
}

/// A ring on `n` vertices with random chords added until every vertex has
/// degree 3.
pub fn ring_plus_chords(n: usize, seed: u64) -> Result<MaxCutInstance, InstanceError> {
    if n % 2 != 0 {
        return Err(InstanceError::Parity { n, k: 3 });
    }
    if n < 4 {
        return Err(InstanceError::DegreeTooLarge { n, k: 3 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..GRAPH_RETRY_CAP {
        let mut g = SimpleGraph::cycle(n);
        order.shuffle(&mut rng);
        if order.chunks(2).all(|p| g.add_edge(p[0], p[1]).is_ok()) {
            return Ok(MaxCutInstance {
                graph: g,
                regularity: Some(3),
            });
        }
    }
    Err(InstanceError::RetryCap(GRAPH_RETRY_CAP))
}
