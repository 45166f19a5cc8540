//! Exact quantum circuit simulation by tensor-network contraction.
//!
//! Each qubit's density matrix is a 4-dimensional leg (`|r><c|` at index
//! `2r + c`), gates are superoperators `U ⊗ conj(U)`, and a circuit with one
//! measurement vector per qubit becomes a closed network that contracts to
//! the expectation value.
//!
//! ```
//! use tncircuit::{circuit::parse_circuit, engine::{expectation, SimConfig}};
//!
//! let bell = parse_circuit("2\nH 0\nCNOT 0 1\nMEASZ 0\nMEASZ 1").unwrap();
//! let out = expectation(&bell, &SimConfig::default()).unwrap();
//! assert!((out.value.re - 1.0).abs() < 1e-12);
//! ```

pub mod circuit;
pub mod cli;
pub mod engine;
pub mod network;
pub mod oracle;
pub mod ordering;
pub mod qaoa;
pub mod tensor;

pub use engine::{expectation, plan, Expectation, PlannerKind, SimConfig, SimError};
