//! Tensor networks built from circuits, and plan execution by wire elimination.
//!
//! Eliminating a wire merges its two endpoint tensors and contracts every wire
//! the pair shares. Plans are written against the initial wires; a union-find
//! over nodes maps a stale wire to the super-nodes that now own its endpoints,
//! and a wire whose endpoints already share a super-node is skipped.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{input_tensor, Circuit};
use crate::tensor::{contract_with, ContractOptions, ContractionCost, Tensor, TensorError, WireId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("index {0} is an open edge")]
    OpenEdge(WireId),
    #[error("index {0} appears on more than two tensors")]
    OverusedLabel(WireId),
    #[error("plan references unknown wire {0}")]
    UnknownWire(WireId),
    #[error("plan leaves {0} wire(s) uncontracted")]
    IncompletePlan(usize),
    #[error("step {step} (wire {wire}) would create a rank {rank} tensor, above the cap of {cap}")]
    RankCap {
        step: usize,
        wire: WireId,
        rank: usize,
        cap: usize,
    },
    #[error("step {step} (wire {wire}): {source}")]
    Tensor {
        step: usize,
        wire: WireId,
        source: TensorError,
    },
}

/// What a network node stands for.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NodeRole {
    Input(usize),
    Gate(usize),
    Measurement(usize),
    Free,
}

#[derive(Clone, Debug)]
pub struct TensorNetwork {
    tensors: Vec<Tensor>,
    roles: Vec<NodeRole>,
    wire_ids: Vec<WireId>,
    endpoints: Vec<(usize, usize)>,
    wire_index: HashMap<WireId, usize>,
}

impl TensorNetwork {
    /// Joins tensors by their shared labels. Every label must appear on
    /// exactly two tensors.
    pub fn from_tensors(tensors: Vec<Tensor>) -> Result<Self, NetworkError> {
        let roles = vec![NodeRole::Free; tensors.len()];
        TensorNetwork::with_roles(tensors, roles)
    }

    fn with_roles(tensors: Vec<Tensor>, roles: Vec<NodeRole>) -> Result<Self, NetworkError> {
        let mut seen: BTreeMap<WireId, Vec<usize>> = BTreeMap::new();
        for (node, t) in tensors.iter().enumerate() {
            for &label in t.indices() {
                seen.entry(label).or_default().push(node);
            }
        }
        let mut wire_ids = Vec::with_capacity(seen.len());
        let mut endpoints = Vec::with_capacity(seen.len());
        for (label, nodes) in seen {
            match nodes.as_slice() {
                [a, b] => {
                    wire_ids.push(label);
                    endpoints.push((*a, *b));
                }
                [_] => return Err(NetworkError::OpenEdge(label)),
                _ => return Err(NetworkError::OverusedLabel(label)),
            }
        }
        let wire_index = wire_ids.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        Ok(TensorNetwork {
            tensors,
            roles,
            wire_ids,
            endpoints,
            wire_index,
        })
    }

    /// One input node per qubit, one node per gate in circuit order, one
    /// measurement node per qubit; wires follow the qubit timelines.
    pub fn from_circuit(circuit: &Circuit) -> Self {
        let n = circuit.num_qubits();
        let mut next_wire = 0usize;
        let mut fresh = || {
            let w = WireId(next_wire);
            next_wire += 1;
            w
        };
        let mut tensors = Vec::with_capacity(2 * n + circuit.ops().len());
        let mut roles = Vec::with_capacity(tensors.capacity());
        let mut current: Vec<WireId> = Vec::with_capacity(n);
        for q in 0..n {
            let w = fresh();
            current.push(w);
            tensors.push(input_tensor(w));
            roles.push(NodeRole::Input(q));
        }
        for (k, op) in circuit.ops().iter().enumerate() {
            let ins: Vec<WireId> = op.qubits.iter().map(|&q| current[q]).collect();
            let outs: Vec<WireId> = op.qubits.iter().map(|_| fresh()).collect();
            for (&q, &w) in op.qubits.iter().zip(&outs) {
                current[q] = w;
            }
            tensors.push(op.gate.tensor(&outs, &ins));
            roles.push(NodeRole::Gate(k));
        }
        for (q, m) in circuit.measurements().iter().enumerate() {
            tensors.push(m.tensor(current[q]));
            roles.push(NodeRole::Measurement(q));
        }
        TensorNetwork::with_roles(tensors, roles).expect("circuit networks are closed")
    }

    pub fn node_count(&self) -> usize {
        self.tensors.len()
    }

    pub fn wire_count(&self) -> usize {
        self.wire_ids.len()
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    /// Wire labels in index order; index `i` is vertex `i` of the line graph.
    pub fn wires(&self) -> &[WireId] {
        &self.wire_ids
    }

    /// Endpoint nodes of each wire, in index order.
    pub fn endpoints(&self) -> &[(usize, usize)] {
        &self.endpoints
    }

    pub fn wire_position(&self, wire: WireId) -> Option<usize> {
        self.wire_index.get(&wire).copied()
    }

    pub fn endpoints_of(&self, wire: WireId) -> Option<(usize, usize)> {
        self.wire_position(wire).map(|i| self.endpoints[i])
    }

    pub fn node_ranks(&self) -> Vec<usize> {
        self.tensors.iter().map(Tensor::rank).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut sets = MergeState::new(self);
        for &(a, b) in &self.endpoints {
            sets.merge(a, b);
        }
        let root = sets.find(0);
        (0..n).all(|v| sets.find(v) == root)
    }

    /// Simulates an elimination order on the abstract graph, without tensor data.
    pub fn simulate_plan(&self, order: &[WireId]) -> Result<ContractionCost, NetworkError> {
        self.dry_run(order, usize::MAX)
    }

    /// Like [`TensorNetwork::simulate_plan`], failing on the first step whose
    /// output rank exceeds `rank_cap`.
    pub fn check_plan(
        &self,
        order: &[WireId],
        rank_cap: usize,
    ) -> Result<ContractionCost, NetworkError> {
        self.dry_run(order, rank_cap)
    }

    fn dry_run(&self, order: &[WireId], rank_cap: usize) -> Result<ContractionCost, NetworkError> {
        let mut state = MergeState::new(self);
        let mut total = ContractionCost::default();
        for (step, &wire) in order.iter().enumerate() {
            let (u, v) = self
                .endpoints_of(wire)
                .ok_or(NetworkError::UnknownWire(wire))?;
            if let Some(preview) = state.preview(u, v) {
                if preview.rank_out > rank_cap {
                    return Err(NetworkError::RankCap {
                        step,
                        wire,
                        rank: preview.rank_out,
                        cap: rank_cap,
                    });
                }
                state.merge(u, v);
                total.accumulate(preview.cost());
            }
        }
        let left = state.live_wire_count(self);
        if left > 0 {
            return Err(NetworkError::IncompletePlan(left));
        }
        Ok(total)
    }

    /// Contracts the network to a scalar following `order`. The whole plan
    /// is checked against the rank cap before any tensor is touched.
    pub fn execute(
        &self,
        order: &[WireId],
        opts: &ContractOptions,
    ) -> Result<Execution, NetworkError> {
        self.check_plan(order, opts.rank_cap)?;
        let mut state = MergeState::new(self);
        let mut slots: Vec<Option<Tensor>> = self.tensors.iter().cloned().map(Some).collect();
        let mut factor = Complex64::new(1.0, 0.0);
        let mut cost = ContractionCost::default();
        for slot in slots.iter_mut() {
            if let Some(s) = slot.as_ref().and_then(Tensor::as_scalar) {
                factor *= s;
                *slot = None;
            }
        }
        for (step, &wire) in order.iter().enumerate() {
            let (u, v) = self
                .endpoints_of(wire)
                .ok_or(NetworkError::UnknownWire(wire))?;
            let (ru, rv) = (state.find(u), state.find(v));
            if ru == rv {
                continue;
            }
            let predicted = state.rank[ru] + state.rank[rv] - 2 * state.shared(ru, rv);
            if predicted > opts.rank_cap {
                return Err(NetworkError::RankCap {
                    step,
                    wire,
                    rank: predicted,
                    cap: opts.rank_cap,
                });
            }
            let a = slots[ru].take().expect("live super-node has a tensor");
            let b = slots[rv].take().expect("live super-node has a tensor");
            let (c, step_cost) = contract_with(&a, &b, opts).map_err(|source| match source {
                TensorError::RankCap { rank, cap } => NetworkError::RankCap {
                    step,
                    wire,
                    rank,
                    cap,
                },
                source => NetworkError::Tensor { step, wire, source },
            })?;
            cost.accumulate(step_cost);
            let merged = state.merge(u, v).expect("distinct roots");
            debug_assert_eq!(merged.rank_out, c.rank());
            match c.as_scalar() {
                Some(s) => factor *= s,
                None => slots[merged.root] = Some(c),
            }
        }
        let left = state.live_wire_count(self);
        if left > 0 {
            return Err(NetworkError::IncompletePlan(left));
        }
        Ok(Execution {
            value: factor,
            cost,
        })
    }
}

/// Result of contracting a network to a scalar.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Execution {
    pub value: Complex64,
    pub cost: ContractionCost,
}

/// One merge of two super-nodes on the abstract graph.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct MergeStep {
    pub root: usize,
    pub rank_a: usize,
    pub rank_b: usize,
    pub shared: usize,
    pub rank_out: usize,
}

impl MergeStep {
    pub fn cost(&self) -> ContractionCost {
        ContractionCost {
            flops: crate::tensor::flops_for(self.rank_a + self.rank_b - self.shared),
            peak_rank: self.rank_a.max(self.rank_b).max(self.rank_out),
        }
    }
}

/// Union-find over nodes with wire multiplicities between super-nodes.
#[derive(Clone, Debug)]
pub struct MergeState {
    parent: Vec<usize>,
    rank: Vec<usize>,
    adjacency: Vec<BTreeMap<usize, usize>>,
}

impl MergeState {
    pub fn new(net: &TensorNetwork) -> Self {
        let n = net.node_count();
        let mut adjacency = vec![BTreeMap::new(); n];
        for &(a, b) in &net.endpoints {
            *adjacency[a].entry(b).or_insert(0) += 1;
            *adjacency[b].entry(a).or_insert(0) += 1;
        }
        MergeState {
            parent: (0..n).collect(),
            rank: net.node_ranks(),
            adjacency,
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Current rank of the super-node containing `v`.
    pub fn rank_of(&mut self, v: usize) -> usize {
        let r = self.find(v);
        self.rank[r]
    }

    /// Number of wires between two super-node roots.
    pub fn shared(&self, a: usize, b: usize) -> usize {
        self.adjacency[a].get(&b).copied().unwrap_or(0)
    }

    /// What merging the super-nodes of `u` and `v` would produce.
    pub fn preview(&mut self, u: usize, v: usize) -> Option<MergeStep> {
        let (a, b) = (self.find(u), self.find(v));
        if a == b {
            return None;
        }
        let shared = self.shared(a, b);
        Some(MergeStep {
            root: a,
            rank_a: self.rank[a],
            rank_b: self.rank[b],
            shared,
            rank_out: self.rank[a] + self.rank[b] - 2 * shared,
        })
    }

    /// Merges the super-nodes of `u` and `v`; `None` if already merged.
    pub fn merge(&mut self, u: usize, v: usize) -> Option<MergeStep> {
        let step = self.preview(u, v)?;
        let (a, b) = (self.find(u), self.find(v));
        let moved = std::mem::take(&mut self.adjacency[b]);
        self.adjacency[a].remove(&b);
        for (nbr, count) in moved {
            if nbr == a {
                continue;
            }
            let back = self.adjacency[nbr].remove(&b).unwrap_or(0);
            debug_assert_eq!(back, count);
            *self.adjacency[nbr].entry(a).or_insert(0) += count;
            *self.adjacency[a].entry(nbr).or_insert(0) += count;
        }
        self.parent[b] = a;
        self.rank[a] = step.rank_out;
        Some(step)
    }

    pub fn live_wire_count(&mut self, net: &TensorNetwork) -> usize {
        net.endpoints
            .iter()
            .filter(|&&(a, b)| self.find(a) != self.find(b))
            .count()
    }
}
