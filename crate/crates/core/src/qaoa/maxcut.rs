use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::MaxCutInstance;
use crate::circuit::{Circuit, Gate, Measurement};
use crate::engine::{plan, SimConfig, SimError, IMAG_TOL};
use crate::network::TensorNetwork;
use crate::ordering::ContractionPlan;
use crate::tensor::ContractionCost;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QaoaError {
    #[error("{gammas} gammas but {betas} betas")]
    ParamLength { gammas: usize, betas: usize },
    #[error("bit string has {got} bits, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bit strings hold only 0 and 1")]
    BadBit,
}

/// Angles of a depth-p QAOA circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, QaoaError> {
        if gammas.len() != betas.len() {
            return Err(QaoaError::ParamLength {
                gammas: gammas.len(),
                betas: betas.len(),
            });
        }
        Ok(QaoaParams { gammas, betas })
    }

    /// Depth 1.
    pub fn single(gamma: f64, beta: f64) -> Self {
        QaoaParams {
            gammas: vec![gamma],
            betas: vec![beta],
        }
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// Computational-basis outcome; `bits[q]` belongs to qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString(pub Vec<u8>);

impl BitString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Basis index with qubit 0 as the most significant bit.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        BitString((0..n).map(|q| ((index >> (n - 1 - q)) & 1) as u8).collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = QaoaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(QaoaError::BadBit),
            })
            .collect::<Result<_, _>>()
            .map(BitString)
    }
}

/// H on every qubit, then per round ZZ(gamma) on every edge and RX(2 beta) on
/// every qubit. All qubits are trace-measured.
pub fn qaoa_circuit(inst: &MaxCutInstance, params: &QaoaParams) -> Circuit {
    let n = inst.num_vertices();
    let edges = inst.edges();
    let mut c = Circuit::new(n).expect("instances have vertices");
    for q in 0..n {
        c.push(Gate::H, &[q]).unwrap();
    }
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for &(u, v) in &edges {
            c.push(Gate::Zz(gamma), &[u, v]).unwrap();
        }
        for q in 0..n {
            c.push(Gate::Rx(2.0 * beta), &[q]).unwrap();
        }
    }
    c
}

/// `circuit` with Z measured on the edge's endpoints and trace elsewhere.
pub fn edge_observable(circuit: &Circuit, (u, v): (usize, usize)) -> Circuit {
    let mut m = vec![Measurement::Trace; circuit.num_qubits()];
    m[u] = Measurement::Z;
    m[v] = Measurement::Z;
    circuit.with_measurements(m)
}

pub fn cut_value(inst: &MaxCutInstance, bits: &BitString) -> Result<usize, QaoaError> {
    if bits.len() != inst.num_vertices() {
        return Err(QaoaError::LengthMismatch {
            expected: inst.num_vertices(),
            got: bits.len(),
        });
    }
    Ok(inst
        .edges()
        .iter()
        .filter(|&&(u, v)| bits.0[u] != bits.0[v])
        .count())
}

/// Exhaustive Max-Cut, for small graphs.
pub fn max_cut_brute_force(inst: &MaxCutInstance) -> (usize, BitString) {
    let n = inst.num_vertices();
    assert!(n <= 24, "brute force over 2^{n} cuts");
    (0..1usize << n)
        .map(|i| {
            let s = BitString::from_index(i, n);
            (cut_value(inst, &s).unwrap(), s)
        })
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.index().cmp(&a.1.index())))
        .unwrap()
}

/// Per-edge `<Z_u Z_v>` values.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCorrelations {
    pub edges: Vec<(usize, usize)>,
    pub zz: Vec<f64>,
    pub cost: ContractionCost,
    pub plan: ContractionPlan,
}

impl EdgeCorrelations {
    /// `<C> = Σ ½(1 - <Z_u Z_v>)`.
    pub fn cut_expectation(&self) -> f64 {
        self.zz.iter().map(|z| 0.5 * (1.0 - z)).sum()
    }
}

/// Contracts one network per listed edge. Every edge network has the same
/// shape, so a single plan serves all of them.
pub fn edge_correlations(
    inst: &MaxCutInstance,
    params: &QaoaParams,
    edges: &[(usize, usize)],
    cfg: &SimConfig,
) -> Result<EdgeCorrelations, SimError> {
    let circuit = qaoa_circuit(inst, params);
    let shape = TensorNetwork::from_circuit(&circuit);
    let plan = plan(&shape, cfg)?;
    let mut cost = ContractionCost::default();
    let mut zz = Vec::with_capacity(edges.len());
    for &edge in edges {
        let net = TensorNetwork::from_circuit(&edge_observable(&circuit, edge));
        let out = net.execute(&plan.order, &cfg.contract)?;
        if out.value.im.abs() > IMAG_TOL {
            return Err(SimError::ImaginaryPart(out.value.im));
        }
        cost.accumulate(out.cost);
        zz.push(out.value.re);
    }
    Ok(EdgeCorrelations {
        edges: edges.to_vec(),
        zz,
        cost,
        plan,
    })
}

/// Expected cut size of the QAOA state.
pub fn expectation_of_cut(
    inst: &MaxCutInstance,
    params: &QaoaParams,
    cfg: &SimConfig,
) -> Result<f64, SimError> {
    edge_correlations(inst, params, &inst.edges(), cfg).map(|e| e.cut_expectation())
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub gamma: f64,
    pub beta: f64,
    pub value: f64,
}

/// Best depth-1 angles on a `steps x steps` grid over gamma in [0, pi] and
/// beta in [0, pi/2], endpoints included.
pub fn grid_scan(
    inst: &MaxCutInstance,
    steps: usize,
    cfg: &SimConfig,
) -> Result<GridPoint, SimError> {
    assert!(steps >= 2, "a grid needs two points per axis");
    let at = |i: usize, hi: f64| hi * i as f64 / (steps - 1) as f64;
    let mut best: Option<GridPoint> = None;
    for i in 0..steps {
        for j in 0..steps {
            let (gamma, beta) = (
                at(i, std::f64::consts::PI),
                at(j, std::f64::consts::FRAC_PI_2),
            );
            let value = expectation_of_cut(inst, &QaoaParams::single(gamma, beta), cfg)?;
            if best.map_or(true, |b| value > b.value) {
                best = Some(GridPoint { gamma, beta, value });
            }
        }
    }
    Ok(best.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::SimpleGraph;

    fn triangle() -> MaxCutInstance {
        MaxCutInstance::new(SimpleGraph::complete(3), Some(2)).unwrap()
    }

    #[test]
    fn triangle_circuit_shape() {
        let c = qaoa_circuit(&triangle(), &QaoaParams::single(0.3, 0.2));
        let names: Vec<&str> = c.ops().iter().map(|op| op.gate.name()).collect();
        assert_eq!(names.iter().filter(|&&n| n == "H").count(), 3);
        assert_eq!(names.iter().filter(|&&n| n == "ZZ").count(), 3);
        assert_eq!(names.iter().filter(|&&n| n == "RX").count(), 3);
    }

    #[test]
    fn cuts() {
        let k2 = MaxCutInstance::new(SimpleGraph::complete(2), Some(1)).unwrap();
        assert_eq!(cut_value(&k2, &"01".parse().unwrap()), Ok(1));
        assert_eq!(cut_value(&triangle(), &"000".parse().unwrap()), Ok(0));
        assert_eq!(cut_value(&triangle(), &"001".parse().unwrap()), Ok(2));
        assert!(cut_value(&triangle(), &"01".parse().unwrap()).is_err());
        assert_eq!(max_cut_brute_force(&triangle()).0, 2);
    }

    #[test]
    fn zero_angles_cut_half_the_edges() {
        let cfg = SimConfig::default();
        let zero = QaoaParams::single(0.0, 0.0);
        let k2 = MaxCutInstance::new(SimpleGraph::complete(2), Some(1)).unwrap();
        assert!((expectation_of_cut(&k2, &zero, &cfg).unwrap() - 0.5).abs() < 1e-12);
        assert!((expectation_of_cut(&triangle(), &zero, &cfg).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn bit_strings() {
        let s: BitString = "110".parse().unwrap();
        assert_eq!(s.index(), 6);
        assert_eq!(BitString::from_index(6, 3), s);
        assert_eq!(s.to_string(), "110");
        assert_eq!("12".parse::<BitString>(), Err(QaoaError::BadBit));
    }

    #[test]
    fn param_lengths() {
        assert!(QaoaParams::new(vec![0.1, 0.2], vec![0.3]).is_err());
        assert_eq!(QaoaParams::new(vec![0.1], vec![0.3]).unwrap().p(), 1);
    }
}
