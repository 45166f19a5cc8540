//! Circuit representation, gate library and the line-oriented text format.

mod gates;
mod matrix;
mod parse;

use std::fmt;

use thiserror::Error;

pub use gates::{
    input_tensor, input_vector, linear_superoperator, preserves_trace, superoperator, CustomGate,
    Gate, GateAction, KrausChannel, Measurement, UNITARY_TOL,
};
pub use matrix::CMatrix;
pub use parse::{parse_circuit, ParseError, ParseErrorKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("a circuit needs at least one qubit")]
    NoQubits,
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("duplicate qubit in two-qubit gate")]
    DuplicateQubit,
    #[error("gate {gate} acts on {expected} qubit(s), got {got}")]
    Arity {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("matrix for {0} is not unitary")]
    NotUnitary(String),
    #[error("unsupported matrix dimension {0}")]
    BadMatrixSize(usize),
    #[error("Kraus channel has no operators")]
    EmptyChannel,
    #[error("Kraus operators violate completeness by {0:e}")]
    IncompleteChannel(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateApplication {
    pub gate: Gate,
    pub qubits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateApplication>,
    measurements: Vec<Measurement>,
}

impl Circuit {
    /// An empty circuit with every qubit trace-measured.
    pub fn new(num_qubits: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        Ok(Circuit {
            num_qubits,
            ops: Vec::new(),
            measurements: vec![Measurement::Trace; num_qubits],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateApplication] {
        &self.ops
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), CircuitError> {
        if qubit >= self.num_qubits {
            return Err(CircuitError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub fn push(&mut self, gate: Gate, qubits: &[usize]) -> Result<&mut Self, CircuitError> {
        if qubits.len() != gate.arity() {
            return Err(CircuitError::Arity {
                gate: gate.name().to_string(),
                expected: gate.arity(),
                got: qubits.len(),
            });
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(CircuitError::DuplicateQubit);
        }
        self.ops.push(GateApplication {
            gate,
            qubits: qubits.to_vec(),
        });
        Ok(self)
    }

    /// Builder-style [`Circuit::push`].
    pub fn with(mut self, gate: Gate, qubits: &[usize]) -> Result<Self, CircuitError> {
        self.push(gate, qubits)?;
        Ok(self)
    }

    pub fn measure(&mut self, qubit: usize, kind: Measurement) -> Result<&mut Self, CircuitError> {
        self.check_qubit(qubit)?;
        self.measurements[qubit] = kind;
        Ok(self)
    }

    /// Same gates with a new measurement on every qubit.
    pub fn with_measurements(&self, measurements: Vec<Measurement>) -> Self {
        assert_eq!(measurements.len(), self.num_qubits);
        Circuit {
            measurements,
            ..self.clone()
        }
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.ops.iter().all(|op| op.gate.is_trace_preserving())
    }

    pub fn single_qubit_gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.qubits.len() == 1).count()
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.qubits.len() == 2).count()
    }

    /// Serializes to the text format accepted by [`parse_circuit`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl std::str::FromStr for Circuit {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_circuit(s)
    }
}

fn write_entries(f: &mut fmt::Formatter<'_>, m: &CMatrix) -> fmt::Result {
    for row in 0..m.dim() {
        let line: Vec<String> = (0..m.dim())
            .map(|col| {
                let z = m.get(row, col);
                format!("{:?},{:?}", z.re, z.im)
            })
            .collect();
        writeln!(f, "{}", line.join(" "))?;
    }
    Ok(())
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.num_qubits)?;
        let mut defined: Vec<&str> = Vec::new();
        for op in &self.ops {
            let Gate::Custom(custom) = &op.gate else {
                continue;
            };
            if defined.contains(&custom.name.as_str()) {
                continue;
            }
            defined.push(&custom.name);
            match &custom.action {
                GateAction::Unitary(m) | GateAction::Superoperator(m) => {
                    writeln!(f, "DEF {} {}", custom.name, custom.arity)?;
                    write_entries(f, m)?;
                }
                GateAction::Kraus(ch) => {
                    writeln!(
                        f,
                        "KRAUS {} {} {}",
                        custom.name,
                        custom.arity,
                        ch.operators().len()
                    )?;
                    for m in ch.operators() {
                        write_entries(f, m)?;
                    }
                }
            }
        }
        for op in &self.ops {
            write!(f, "{}", op.gate.name())?;
            if let Some(p) = op.gate.param() {
                write!(f, " {p:?}")?;
            }
            for q in &op.qubits {
                write!(f, " {q}")?;
            }
            writeln!(f)?;
        }
        for (q, m) in self.measurements.iter().enumerate() {
            if *m != Measurement::Trace {
                writeln!(f, "{} {}", m.keyword(), q)?;
            }
        }
        Ok(())
    }
}
