//! Test-only reference code: a density-matrix simulator with its own gate
//! matrices, random circuit generation, brute-force treewidth and rank
//! correlation.

#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use tncircuit::circuit::{Circuit, CustomGate, Gate, KrausChannel, Measurement};
use tncircuit::ordering::SimpleGraph;

pub type C = Complex64;

const O: C = C::new(0.0, 0.0);
const L: C = C::new(1.0, 0.0);
const J: C = C::new(0.0, 1.0);

/// A gate as plain data: name, optional angle, qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Op {
    pub name: &'static str,
    pub param: Option<f64>,
    pub qubits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomCircuit {
    pub n: usize,
    pub ops: Vec<Op>,
    pub measurements: Vec<Measurement>,
}

pub const ONE_QUBIT: [&str; 9] = ["X", "Y", "Z", "H", "S", "T", "RX", "RY", "RZ"];
pub const TWO_QUBIT: [&str; 4] = ["CNOT", "CZ", "SWAP", "ZZ"];
pub const DEPOLARIZING: &str = "DEPOL";

fn takes_angle(name: &str) -> bool {
    matches!(name, "RX" | "RY" | "RZ" | "ZZ")
}

/// Row-major `d x d` matrix of a gate, written out by hand.
pub fn matrix(name: &str, param: Option<f64>) -> Vec<C> {
    let t = param.unwrap_or(0.0);
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    let h = FRAC_1_SQRT_2;
    let e = |phi: f64| C::from_polar(1.0, phi);
    match name {
        "X" => vec![O, L, L, O],
        "Y" => vec![O, -J, J, O],
        "Z" => vec![L, O, O, -L],
        "H" => vec![h.into(), h.into(), h.into(), (-h).into()],
        "S" => vec![L, O, O, J],
        "T" => vec![L, O, O, e(PI / 4.0)],
        "RX" => vec![c.into(), -J * s, -J * s, c.into()],
        "RY" => vec![c.into(), (-s).into(), s.into(), c.into()],
        "RZ" => vec![e(-t / 2.0), O, O, e(t / 2.0)],
        "CNOT" => {
            let mut m = vec![O; 16];
            for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
                m[r * 4 + col] = L;
            }
            m
        }
        "CZ" => diag(&[L, L, L, -L]),
        "SWAP" => {
            let mut m = vec![O; 16];
            for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                m[r * 4 + col] = L;
            }
            m
        }
        "ZZ" => diag(&[L, e(-t), e(-t), L]),
        other => panic!("no matrix for {other}"),
    }
}

fn diag(d: &[C]) -> Vec<C> {
    let n = d.len();
    let mut m = vec![O; n * n];
    for (i, &x) in d.iter().enumerate() {
        m[i * n + i] = x;
    }
    m
}

pub fn depolarizing_kraus(p: f64) -> Vec<Vec<C>> {
    let a = (1.0 - 3.0 * p / 4.0).sqrt();
    let b = (p / 4.0).sqrt();
    let scale = |m: Vec<C>, f: f64| m.into_iter().map(|z| z * f).collect();
    vec![
        scale(diag(&[L, L]), a),
        scale(matrix("X", None), b),
        scale(matrix("Y", None), b),
        scale(matrix("Z", None), b),
    ]
}

pub fn observable(m: Measurement) -> Vec<C> {
    match m {
        Measurement::Trace => vec![L, O, O, L],
        Measurement::X => matrix("X", None),
        Measurement::Y => matrix("Y", None),
        Measurement::Z => matrix("Z", None),
        Measurement::Proj0 => vec![L, O, O, O],
        Measurement::Proj1 => vec![O, O, O, L],
    }
}

/// A `k`-qubit operator on `qs` lifted to the full `2^n` register.
fn embed(n: usize, qs: &[usize], op: &[C]) -> Vec<C> {
    let dim = 1 << n;
    let k = qs.len();
    let local = |i: usize| {
        qs.iter()
            .fold(0, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1))
    };
    let mask: usize = qs.iter().map(|&q| 1 << (n - 1 - q)).sum();
    let mut full = vec![O; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            if r & !mask == c & !mask {
                full[r * dim + c] = op[local(r) * (1 << k) + local(c)];
            }
        }
    }
    full
}

fn matmul(a: &[C], b: &[C], d: usize) -> Vec<C> {
    let mut out = vec![O; d * d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i * d + k];
            if x == O {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += x * b[k * d + j];
            }
        }
    }
    out
}

fn dagger(a: &[C], d: usize) -> Vec<C> {
    let mut out = vec![O; d * d];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = a[i * d + j].conj();
        }
    }
    out
}

/// Final density matrix from `|0..0>`, `2^n x 2^n` row-major.
pub fn dense_rho(rc: &RandomCircuit) -> Vec<C> {
    let d = 1 << rc.n;
    let mut rho = vec![O; d * d];
    rho[0] = L;
    for op in &rc.ops {
        let kraus = if op.name == DEPOLARIZING {
            depolarizing_kraus(op.param.unwrap())
        } else {
            vec![matrix(op.name, op.param)]
        };
        let mut next = vec![O; d * d];
        for e in kraus {
            let full = embed(rc.n, &op.qubits, &e);
            let term = matmul(&matmul(&full, &rho, d), &dagger(&full, d), d);
            for (x, y) in next.iter_mut().zip(term) {
                *x += y;
            }
        }
        rho = next;
    }
    rho
}

/// `Tr((⊗ O_q) rho)`.
pub fn dense_expectation(rc: &RandomCircuit) -> C {
    let d = 1 << rc.n;
    let rho = dense_rho(rc);
    let mut obs = vec![O; d * d];
    for i in 0..d {
        obs[i * d + i] = L;
    }
    for (q, &m) in rc.measurements.iter().enumerate() {
        obs = matmul(&embed(rc.n, &[q], &observable(m)), &obs, d);
    }
    let prod = matmul(&obs, &rho, d);
    (0..d).map(|i| prod[i * d + i]).sum()
}

pub fn dense_distribution(rc: &RandomCircuit) -> Vec<f64> {
    let d = 1 << rc.n;
    let rho = dense_rho(rc);
    (0..d).map(|i| rho[i * d + i].re).collect()
}

/// The same circuit through the library's API.
pub fn to_library(rc: &RandomCircuit) -> Circuit {
    let mut c = Circuit::new(rc.n).unwrap();
    for op in &rc.ops {
        let t = op.param.unwrap_or(0.0);
        let gate = match op.name {
            "X" => Gate::X,
            "Y" => Gate::Y,
            "Z" => Gate::Z,
            "H" => Gate::H,
            "S" => Gate::S,
            "T" => Gate::T,
            "RX" => Gate::Rx(t),
            "RY" => Gate::Ry(t),
            "RZ" => Gate::Rz(t),
            "CNOT" => Gate::Cnot,
            "CZ" => Gate::Cz,
            "SWAP" => Gate::Swap,
            "ZZ" => Gate::Zz(t),
            DEPOLARIZING => {
                let ch = KrausChannel::depolarizing(t).unwrap();
                Gate::Custom(Arc::new(CustomGate::kraus("DEPOL", ch)))
            }
            other => panic!("unknown {other}"),
        };
        c.push(gate, &op.qubits).unwrap();
    }
    c.with_measurements(rc.measurements.clone())
}

/// Random gates from the full built-in set; with `kraus`, one depolarizing
/// node at a random position.
pub fn random_circuit(
    rng: &mut impl Rng,
    n: usize,
    max_gates: usize,
    kraus: bool,
    measurements: &[Measurement],
) -> RandomCircuit {
    let count = rng.gen_range(0..=max_gates);
    let mut ops: Vec<Op> = (0..count)
        .map(|_| {
            let two = n >= 2 && rng.gen_bool(0.35);
            let name = if two {
                *TWO_QUBIT.choose(rng).unwrap()
            } else {
                *ONE_QUBIT.choose(rng).unwrap()
            };
            let mut qubits: Vec<usize> = (0..n).collect();
            qubits.shuffle(rng);
            qubits.truncate(if two { 2 } else { 1 });
            let param = takes_angle(name).then(|| rng.gen_range(-PI..PI));
            Op {
                name,
                param,
                qubits,
            }
        })
        .collect();
    if kraus {
        let at = rng.gen_range(0..=ops.len());
        let op = Op {
            name: DEPOLARIZING,
            param: Some(rng.gen_range(0.0..1.0)),
            qubits: vec![rng.gen_range(0..n)],
        };
        ops.insert(at, op);
    }
    let measurements = (0..n).map(|_| *measurements.choose(rng).unwrap()).collect();
    RandomCircuit {
        n,
        ops,
        measurements,
    }
}

pub const PAULI_AND_TRACE: [Measurement; 4] = [
    Measurement::Trace,
    Measurement::X,
    Measurement::Y,
    Measurement::Z,
];

/// Exact treewidth by trying every elimination order.
pub fn brute_force_treewidth(g: &SimpleGraph) -> usize {
    let n = g.vertex_count();
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).fold(0u32, |m, u| m | 1 << u))
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = usize::MAX;
    permute(&mut perm, 0, &mut |order| {
        best = best.min(order_width(&adj, order));
    });
    if n == 0 {
        0
    } else {
        best
    }
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Largest neighbourhood at elimination, with fill-in.
pub fn order_width(adj: &[u32], order: &[usize]) -> usize {
    let mut adj = adj.to_vec();
    let mut gone = 0u32;
    let mut width = 0;
    for &v in order {
        let nb = adj[v] & !gone;
        width = width.max(nb.count_ones() as usize);
        for u in 0..adj.len() {
            if nb >> u & 1 == 1 {
                adj[u] |= nb & !(1 << u);
            }
        }
        gone |= 1 << v;
    }
    width
}

/// Random connected graph on `n` vertices: a random spanning tree plus extra
/// edges with probability `extra`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, extra: f64) -> SimpleGraph {
    let mut g = SimpleGraph::new(n);
    for v in 1..n {
        g.add_edge(v, rng.gen_range(0..v)).unwrap();
    }
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) && rng.gen_bool(extra) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman correlation with tied values sharing their average rank.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Peak rank allowed for randomly drawn plans; keeps tensors near 64 MiB.
pub const RANDOM_PLAN_CAP: usize = 11;

/// A uniformly random wire order whose predicted peak rank fits under
/// [`RANDOM_PLAN_CAP`], or a stochastic plan if 200 draws all exceed it.
/// The flag says whether the permutation was used.
pub fn random_valid_plan(
    net: &tncircuit::network::TensorNetwork,
    rng: &mut impl Rng,
) -> (Vec<tncircuit::tensor::WireId>, bool) {
    let mut order = net.wires().to_vec();
    for _ in 0..200 {
        order.shuffle(rng);
        if net.simulate_plan(&order).unwrap().peak_rank <= RANDOM_PLAN_CAP {
            return (order, true);
        }
    }
    let plan = tncircuit::ordering::stochastic_plan(net, 2 * net.wire_count(), rng.gen()).unwrap();
    (plan.order, false)
}
