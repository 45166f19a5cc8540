//! Gate matrices and their superoperator tensors.
//!
//! A qubit leg of the network carries the vectorized density matrix with
//! `|r><c|` stored at index `2r + c`. A gate acting on `a` qubits becomes a
//! `4^a x 4^a` superoperator whose rows are the output legs and columns the
//! input legs, each group ordered by the gate's qubit order. Read row-major it
//! is the gate tensor with legs `[out_0, .., out_{a-1}, in_0, .., in_{a-1}]`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::matrix::CMatrix;
use super::CircuitError;
use crate::tensor::{Tensor, WireId};

/// Tolerance for unitarity and Kraus completeness checks.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cnot,
    Cz,
    Swap,
    /// `exp(-i gamma (1 - Z⊗Z) / 2)`, the Max-Cut clause phase.
    Zz(f64),
    Custom(Arc<CustomGate>),
}

/// A user-defined gate.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomGate {
    pub name: String,
    pub arity: usize,
    pub action: GateAction,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateAction {
    /// A `2^arity` unitary.
    Unitary(CMatrix),
    /// A trace-preserving channel given by Kraus operators.
    Kraus(KrausChannel),
    /// A raw `4^arity` superoperator in leg layout; no physicality is assumed.
    Superoperator(CMatrix),
}

impl CustomGate {
    pub fn unitary(name: &str, matrix: CMatrix) -> Result<Self, CircuitError> {
        let arity = arity_of_hilbert_dim(matrix.dim())?;
        if !matrix.is_unitary(UNITARY_TOL) {
            return Err(CircuitError::NotUnitary(name.to_string()));
        }
        Ok(CustomGate {
            name: name.to_string(),
            arity,
            action: GateAction::Unitary(matrix),
        })
    }

    pub fn kraus(name: &str, channel: KrausChannel) -> Self {
        CustomGate {
            name: name.to_string(),
            arity: channel.arity(),
            action: GateAction::Kraus(channel),
        }
    }

    pub fn superoperator(name: &str, matrix: CMatrix) -> Result<Self, CircuitError> {
        let arity = match matrix.dim() {
            4 => 1,
            16 => 2,
            d => return Err(CircuitError::BadMatrixSize(d)),
        };
        Ok(CustomGate {
            name: name.to_string(),
            arity,
            action: GateAction::Superoperator(matrix),
        })
    }
}

fn arity_of_hilbert_dim(dim: usize) -> Result<usize, CircuitError> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        d => Err(CircuitError::BadMatrixSize(d)),
    }
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot | Gate::Cz | Gate::Swap | Gate::Zz(_) => 2,
            Gate::Custom(g) => g.arity,
            _ => 1,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::H => "H",
            Gate::S => "S",
            Gate::T => "T",
            Gate::Rx(_) => "RX",
            Gate::Ry(_) => "RY",
            Gate::Rz(_) => "RZ",
            Gate::Cnot => "CNOT",
            Gate::Cz => "CZ",
            Gate::Swap => "SWAP",
            Gate::Zz(_) => "ZZ",
            Gate::Custom(g) => &g.name,
        }
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            Gate::Rx(t) | Gate::Ry(t) | Gate::Rz(t) | Gate::Zz(t) => Some(t),
            _ => None,
        }
    }

    /// The gate's unitary, if it has one.
    pub fn unitary(&self) -> Option<CMatrix> {
        let h = FRAC_1_SQRT_2;
        let m = match self {
            Gate::X => CMatrix::from_real(2, &[0., 1., 1., 0.]),
            Gate::Y => CMatrix::new(2, vec![ZERO, -I, I, ZERO]),
            Gate::Z => CMatrix::from_real(2, &[1., 0., 0., -1.]),
            Gate::H => CMatrix::from_real(2, &[h, h, h, -h]),
            Gate::S => CMatrix::diagonal(&[ONE, I]),
            Gate::T => {
                CMatrix::diagonal(&[ONE, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
            }
            Gate::Rx(t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                CMatrix::new(2, vec![c.into(), -I * s, -I * s, c.into()])
            }
            Gate::Ry(t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                CMatrix::from_real(2, &[c, -s, s, c])
            }
            Gate::Rz(t) => CMatrix::diagonal(&[
                Complex64::from_polar(1.0, -t / 2.0),
                Complex64::from_polar(1.0, t / 2.0),
            ]),
            Gate::Cnot => CMatrix::from_real(
                4,
                &[
                    1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.,
                ],
            ),
            Gate::Cz => CMatrix::diagonal(&[ONE, ONE, ONE, -ONE]),
            Gate::Swap => CMatrix::from_real(
                4,
                &[
                    1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.,
                ],
            ),
            Gate::Zz(g) => {
                let p = Complex64::from_polar(1.0, -g);
                CMatrix::diagonal(&[ONE, p, p, ONE])
            }
            Gate::Custom(c) => match &c.action {
                GateAction::Unitary(u) => u.clone(),
                _ => return None,
            },
        };
        Some(m)
    }

    /// The gate's superoperator in leg layout.
    pub fn superoperator(&self) -> CMatrix {
        match self {
            Gate::Custom(c) => match &c.action {
                GateAction::Unitary(u) => linear_superoperator(u),
                GateAction::Kraus(ch) => ch.superoperator(),
                GateAction::Superoperator(s) => s.clone(),
            },
            g => linear_superoperator(&g.unitary().expect("built-in gates are unitary")),
        }
    }

    /// Whether the gate is known to preserve the trace of every density matrix.
    pub fn is_trace_preserving(&self) -> bool {
        match self {
            Gate::Custom(c) => match &c.action {
                GateAction::Superoperator(s) => preserves_trace(s, UNITARY_TOL),
                _ => true,
            },
            _ => true,
        }
    }

    /// The gate tensor with legs `[outs.., ins..]`.
    pub fn tensor(&self, outs: &[WireId], ins: &[WireId]) -> Tensor {
        assert_eq!(outs.len(), self.arity());
        assert_eq!(ins.len(), self.arity());
        let labels = outs.iter().chain(ins).copied().collect();
        Tensor::new(labels, self.superoperator().into_data()).expect("gate tensor shape")
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param() {
            Some(p) => write!(f, "{}({})", self.name(), p),
            None => f.write_str(self.name()),
        }
    }
}

/// `u ⊗ conj(u)` reindexed into per-qubit legs, after checking unitarity.
pub fn superoperator(u: &CMatrix) -> Result<CMatrix, CircuitError> {
    arity_of_hilbert_dim(u.dim())?;
    if !u.is_unitary(UNITARY_TOL) {
        return Err(CircuitError::NotUnitary("matrix".into()));
    }
    Ok(linear_superoperator(u))
}

/// Superoperator of the map `rho -> u rho v^†` in leg layout.
fn pair_superoperator(u: &CMatrix, v: &CMatrix) -> CMatrix {
    let d = u.dim();
    let arity = d.trailing_zeros() as usize;
    let sd = d * d;
    let mut out = CMatrix::zeros(sd);
    // leg index k of qubit j holds (r_j, c_j) as 2 r_j + c_j; the Hilbert index
    // uses qubit 0 as the most significant bit.
    let split = |legs: usize| -> (usize, usize) {
        let (mut r, mut c) = (0, 0);
        for j in 0..arity {
            let leg = (legs >> (2 * (arity - 1 - j))) & 3;
            r = (r << 1) | (leg >> 1);
            c = (c << 1) | (leg & 1);
        }
        (r, c)
    };
    for row in 0..sd {
        let (r, c) = split(row);
        for col in 0..sd {
            let (r2, c2) = split(col);
            out.set(row, col, u.get(r, r2) * v.get(c, c2).conj());
        }
    }
    out
}

/// `u ⊗ conj(u)` in leg layout without any unitarity check.
pub fn linear_superoperator(u: &CMatrix) -> CMatrix {
    pair_superoperator(u, u)
}

fn trace_vector(arity: usize) -> Vec<Complex64> {
    let single = Measurement::Trace.vector();
    let mut v = vec![ONE];
    for _ in 0..arity {
        v = v
            .iter()
            .flat_map(|&a| single.iter().map(move |&b| a * b))
            .collect();
    }
    v
}

/// Checks `M_trace · S == M_trace` for a leg-layout superoperator.
pub fn preserves_trace(s: &CMatrix, tol: f64) -> bool {
    let arity = match s.dim() {
        4 => 1,
        16 => 2,
        _ => return false,
    };
    let t = trace_vector(arity);
    (0..s.dim()).all(|col| {
        let v: Complex64 = (0..s.dim()).map(|row| t[row] * s.get(row, col)).sum();
        (v - t[col]).norm() <= tol
    })
}

/// A set of Kraus operators `E_j` with `Σ E_j† E_j = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self, CircuitError> {
        let first = operators.first().ok_or(CircuitError::EmptyChannel)?;
        let dim = first.dim();
        arity_of_hilbert_dim(dim)?;
        if operators.iter().any(|e| e.dim() != dim) {
            return Err(CircuitError::BadMatrixSize(dim));
        }
        let sum = operators
            .iter()
            .fold(CMatrix::zeros(dim), |acc, e| acc.add(&(&e.adjoint() * e)));
        let err = sum.max_abs_diff(&CMatrix::identity(dim));
        if err > UNITARY_TOL {
            return Err(CircuitError::IncompleteChannel(err));
        }
        Ok(KrausChannel { operators })
    }

    /// Single-qubit depolarizing channel with strength `p` in `[0, 1]`.
    pub fn depolarizing(p: f64) -> Result<Self, CircuitError> {
        let a = (1.0 - 3.0 * p / 4.0).sqrt();
        let b = (p / 4.0).sqrt();
        let ops = [Gate::X, Gate::Y, Gate::Z]
            .iter()
            .map(|g| g.unitary().unwrap().scale(b.into()))
            .collect::<Vec<_>>();
        let mut all = vec![CMatrix::identity(2).scale(a.into())];
        all.extend(ops);
        KrausChannel::new(all)
    }

    pub fn phase_damping(lambda: f64) -> Result<Self, CircuitError> {
        KrausChannel::new(vec![
            CMatrix::diagonal(&[ONE, (1.0 - lambda).sqrt().into()]),
            CMatrix::diagonal(&[ZERO, lambda.sqrt().into()]),
        ])
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self, CircuitError> {
        KrausChannel::new(vec![
            CMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]),
            CMatrix::from_real(2, &[0.0, gamma.sqrt(), 0.0, 0.0]),
        ])
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn arity(&self) -> usize {
        arity_of_hilbert_dim(self.operators[0].dim()).unwrap()
    }

    /// `Σ_j E_j ⊗ conj(E_j)` in leg layout.
    pub fn superoperator(&self) -> CMatrix {
        self.operators
            .iter()
            .map(linear_superoperator)
            .reduce(|acc, s| acc.add(&s))
            .unwrap()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum Measurement {
    #[default]
    Trace,
    X,
    Y,
    Z,
    Proj0,
    Proj1,
}

impl Measurement {
    pub const ALL: [Measurement; 6] = [
        Measurement::Trace,
        Measurement::X,
        Measurement::Y,
        Measurement::Z,
        Measurement::Proj0,
        Measurement::Proj1,
    ];

    /// Rank-1 measurement vector `M` with `<M, rho_vec> = Tr(O rho)`.
    pub fn vector(self) -> [Complex64; 4] {
        match self {
            Measurement::Trace => [ONE, ZERO, ZERO, ONE],
            Measurement::X => [ZERO, ONE, ONE, ZERO],
            Measurement::Y => [ZERO, I, -I, ZERO],
            Measurement::Z => [ONE, ZERO, ZERO, -ONE],
            Measurement::Proj0 => [ONE, ZERO, ZERO, ZERO],
            Measurement::Proj1 => [ZERO, ZERO, ZERO, ONE],
        }
    }

    /// The observable `O` being measured.
    pub fn operator(self) -> CMatrix {
        match self {
            Measurement::Trace => CMatrix::identity(2),
            Measurement::X => Gate::X.unitary().unwrap(),
            Measurement::Y => Gate::Y.unitary().unwrap(),
            Measurement::Z => Gate::Z.unitary().unwrap(),
            Measurement::Proj0 => CMatrix::diagonal(&[ONE, ZERO]),
            Measurement::Proj1 => CMatrix::diagonal(&[ZERO, ONE]),
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Measurement::Trace => "MEAST",
            Measurement::X => "MEASX",
            Measurement::Y => "MEASY",
            Measurement::Z => "MEASZ",
            Measurement::Proj0 => "PROJ0",
            Measurement::Proj1 => "PROJ1",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Measurement::ALL
            .into_iter()
            .find(|m| m.keyword().eq_ignore_ascii_case(word))
    }

    pub fn tensor(self, wire: WireId) -> Tensor {
        Tensor::new(vec![wire], self.vector().to_vec()).unwrap()
    }
}

/// `|0><0|` vectorized.
pub fn input_vector() -> [Complex64; 4] {
    [ONE, ZERO, ZERO, ZERO]
}

pub fn input_tensor(wire: WireId) -> Tensor {
    Tensor::new(vec![wire], input_vector().to_vec()).unwrap()
}
