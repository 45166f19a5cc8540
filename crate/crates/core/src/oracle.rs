//! Brute-force density-matrix simulator used as ground truth.
//!
//! The state is the full `2^n x 2^n` density matrix, row-major, with qubit 0
//! as the most significant bit of a basis index. Gates are applied as
//! `rho -> A rho B^†` on the matrix directly; nothing here goes through the
//! tensor network or the contraction planners.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{CMatrix, Circuit, Gate, GateAction};

/// Largest register the oracle accepts.
pub const MAX_ORACLE_QUBITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} qubits exceed the oracle limit of {MAX_ORACLE_QUBITS}")]
    TooManyQubits(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    num_qubits: usize,
    rho: Vec<Complex64>,
}

/// Basis indices of the `2^qs.len()` states that agree with `base` outside `qs`;
/// entry `k` sets qubit `qs[0]` from the most significant bit of `k`.
fn group(n: usize, qs: &[usize], base: usize) -> Vec<usize> {
    let a = qs.len();
    (0..1usize << a)
        .map(|k| {
            qs.iter().enumerate().fold(base, |idx, (j, &q)| {
                let bit = (k >> (a - 1 - j)) & 1;
                idx | (bit << (n - 1 - q))
            })
        })
        .collect()
}

fn bases(n: usize, qs: &[usize]) -> impl Iterator<Item = usize> {
    let mask: usize = qs.iter().map(|&q| 1 << (n - 1 - q)).sum();
    (0..1usize << n).filter(move |i| i & mask == 0)
}

impl DenseState {
    /// `|0..0><0..0|`.
    pub fn zero_state(num_qubits: usize) -> Result<Self, OracleError> {
        if num_qubits > MAX_ORACLE_QUBITS {
            return Err(OracleError::TooManyQubits(num_qubits));
        }
        let dim = 1usize << num_qubits;
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        rho[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { num_qubits, rho })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    /// Density-matrix entry `<row| rho |col>`.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.rho[row * self.dim() + col]
    }

    /// Row-major density matrix.
    pub fn density_matrix(&self) -> &[Complex64] {
        &self.rho
    }

    /// Vectorization with one `2r + c` digit per qubit, qubit 0 most significant.
    pub fn leg_vector(&self) -> Vec<Complex64> {
        let n = self.num_qubits;
        (0..self.rho.len())
            .map(|legs| {
                let (mut r, mut c) = (0, 0);
                for q in 0..n {
                    let d = (legs >> (2 * (n - 1 - q))) & 3;
                    r = (r << 1) | (d >> 1);
                    c = (c << 1) | (d & 1);
                }
                self.entry(r, c)
            })
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `rho -> left_q rho`, for a `2^k` matrix acting on qubits `qs`.
    fn multiply_left(&mut self, qs: &[usize], left: &CMatrix) {
        let n = self.num_qubits;
        let d = self.dim();
        for base in bases(n, qs) {
            let rows = group(n, qs, base);
            for col in 0..d {
                let old: Vec<Complex64> = rows.iter().map(|&r| self.rho[r * d + col]).collect();
                for (k, &r) in rows.iter().enumerate() {
                    self.rho[r * d + col] = (0..rows.len()).map(|j| left.get(k, j) * old[j]).sum();
                }
            }
        }
    }

    /// `rho -> rho right_q^†`.
    fn multiply_right_adjoint(&mut self, qs: &[usize], right: &CMatrix) {
        let n = self.num_qubits;
        let d = self.dim();
        for base in bases(n, qs) {
            let cols = group(n, qs, base);
            for row in 0..d {
                let old: Vec<Complex64> = cols.iter().map(|&c| self.rho[row * d + c]).collect();
                for (k, &c) in cols.iter().enumerate() {
                    self.rho[row * d + c] = (0..cols.len())
                        .map(|j| old[j] * right.get(k, j).conj())
                        .sum();
                }
            }
        }
    }

    pub fn apply_unitary(&mut self, qs: &[usize], u: &CMatrix) {
        self.multiply_left(qs, u);
        self.multiply_right_adjoint(qs, u);
    }

    /// `rho -> Σ_j E_j rho E_j^†`.
    pub fn apply_kraus(&mut self, qs: &[usize], operators: &[CMatrix]) {
        let mut total = vec![Complex64::new(0.0, 0.0); self.rho.len()];
        for e in operators {
            let mut branch = self.clone();
            branch.apply_unitary(qs, e);
            for (t, b) in total.iter_mut().zip(&branch.rho) {
                *t += b;
            }
        }
        self.rho = total;
    }

    /// Applies a superoperator given in leg layout (rows are output legs).
    pub fn apply_superoperator(&mut self, qs: &[usize], s: &CMatrix) {
        let n = self.num_qubits;
        let d = self.dim();
        let a = qs.len();
        let rbases: Vec<usize> = bases(n, qs).collect();
        let old = self.rho.clone();
        for &rb in &rbases {
            let rows = group(n, qs, rb);
            for &cb in &rbases {
                let cols = group(n, qs, cb);
                // leg index over qs: digit 2 r_j + c_j per qubit, qs[0] first
                let leg = |rk: usize, ck: usize| {
                    (0..a).fold(0, |acc, j| {
                        let r = (rk >> (a - 1 - j)) & 1;
                        let c = (ck >> (a - 1 - j)) & 1;
                        acc * 4 + 2 * r + c
                    })
                };
                for (rk, &r) in rows.iter().enumerate() {
                    for (ck, &c) in cols.iter().enumerate() {
                        let out = leg(rk, ck);
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (rj, &r2) in rows.iter().enumerate() {
                            for (cj, &c2) in cols.iter().enumerate() {
                                acc += s.get(out, leg(rj, cj)) * old[r2 * d + c2];
                            }
                        }
                        self.rho[r * d + c] = acc;
                    }
                }
            }
        }
    }

    /// `rho -> D rho D^†` for a diagonal unitary on the whole register.
    pub fn apply_full_diagonal(&mut self, diag: &[Complex64]) {
        let d = self.dim();
        assert_eq!(diag.len(), d);
        for r in 0..d {
            for c in 0..d {
                self.rho[r * d + c] *= diag[r] * diag[c].conj();
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate, qs: &[usize]) {
        match gate {
            Gate::Custom(custom) => match &custom.action {
                GateAction::Unitary(u) => self.apply_unitary(qs, u),
                GateAction::Kraus(ch) => self.apply_kraus(qs, ch.operators()),
                GateAction::Superoperator(s) => self.apply_superoperator(qs, s),
            },
            g => self.apply_unitary(qs, &g.unitary().expect("built-in gates are unitary")),
        }
    }

    /// `Tr((⊗_q O_q) rho)` for one observable per qubit.
    pub fn expectation_of(&self, observables: &[CMatrix]) -> Complex64 {
        assert_eq!(observables.len(), self.num_qubits);
        let mut work = self.clone();
        for (q, o) in observables.iter().enumerate() {
            if *o != CMatrix::identity(2) {
                work.multiply_left(&[q], o);
            }
        }
        work.trace()
    }

    /// Probabilities of the computational basis states, qubit 0 most significant.
    pub fn distribution(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i).re).collect()
    }
}

/// Runs a circuit from `|0..0>`.
pub fn oracle_simulate(circuit: &Circuit) -> Result<DenseState, OracleError> {
    let mut state = DenseState::zero_state(circuit.num_qubits())?;
    for op in circuit.ops() {
        state.apply_gate(&op.gate, &op.qubits);
    }
    Ok(state)
}

/// Expectation of the circuit's per-qubit measurements.
pub fn oracle_expectation(circuit: &Circuit) -> Result<Complex64, OracleError> {
    let state = oracle_simulate(circuit)?;
    let observables: Vec<CMatrix> = circuit
        .measurements()
        .iter()
        .map(|m| m.operator())
        .collect();
    Ok(state.expectation_of(&observables))
}

pub fn oracle_distribution(state: &DenseState) -> Vec<f64> {
    state.distribution()
}
