//! Parser for the circuit text format.
//!
//! ```text
//! 2                 # qubit count
//! H 0
//! RZ 1.5707963 0    # parameter before the qubits
//! CNOT 0 1
//! MEASZ 0
//! ```
//!
//! `DEF <name> <arity>` is followed by `re,im` entries, row-major: `4^arity`
//! entries define a unitary, `16^arity` entries a raw superoperator in leg
//! layout. `KRAUS <name> <arity> <count>` is followed by `count` Kraus
//! operators of `4^arity` entries each.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use super::{CMatrix, Circuit, CircuitError, CustomGate, Gate, KrausChannel, Measurement};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("missing qubit count")]
    MissingQubitCount,
    #[error("invalid qubit count {0:?}")]
    BadQubitCount(String),
    #[error("unknown gate {0:?}")]
    UnknownGate(String),
    #[error("malformed parameter {0:?}")]
    MalformedParam(String),
    #[error("malformed qubit index {0:?}")]
    MalformedQubit(String),
    #[error("expected {expected} operand(s), got {got}")]
    OperandCount { expected: usize, got: usize },
    #[error("duplicate measurement for qubit {0}")]
    DuplicateMeasurement(usize),
    #[error("malformed matrix entry {0:?}")]
    MalformedEntry(String),
    #[error("bad definition: {0}")]
    BadDefinition(String),
    #[error("{0}")]
    Circuit(#[from] CircuitError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn builtin(name: &str, param: Option<f64>) -> Option<Gate> {
    let upper = name.to_ascii_uppercase();
    let gate = match (upper.as_str(), param) {
        ("X", None) => Gate::X,
        ("Y", None) => Gate::Y,
        ("Z", None) => Gate::Z,
        ("H", None) => Gate::H,
        ("S", None) => Gate::S,
        ("T", None) => Gate::T,
        ("CNOT", None) => Gate::Cnot,
        ("CZ", None) => Gate::Cz,
        ("SWAP", None) => Gate::Swap,
        ("RX", Some(t)) => Gate::Rx(t),
        ("RY", Some(t)) => Gate::Ry(t),
        ("RZ", Some(t)) => Gate::Rz(t),
        ("ZZ", Some(t)) => Gate::Zz(t),
        _ => return None,
    };
    Some(gate)
}

fn builtin_takes_param(name: &str) -> Option<bool> {
    match name.to_ascii_uppercase().as_str() {
        "X" | "Y" | "Z" | "H" | "S" | "T" | "CNOT" | "CZ" | "SWAP" => Some(false),
        "RX" | "RY" | "RZ" | "ZZ" => Some(true),
        _ => None,
    }
}

fn is_reserved(name: &str) -> bool {
    builtin_takes_param(name).is_some()
        || Measurement::from_keyword(name).is_some()
        || name.eq_ignore_ascii_case("DEF")
        || name.eq_ignore_ascii_case("KRAUS")
}

fn parse_entry(token: &str, line: usize) -> Result<Complex64, ParseError> {
    let bad = || err(line, ParseErrorKind::MalformedEntry(token.to_string()));
    let (re, im) = token.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_qubit(token: &str, line: usize) -> Result<usize, ParseError> {
    token
        .parse()
        .map_err(|_| err(line, ParseErrorKind::MalformedQubit(token.to_string())))
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

/// Parses a circuit; unmeasured qubits default to a trace measurement.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            (!tokens.is_empty()).then_some(Line {
                number: i + 1,
                tokens,
            })
        })
        .collect();

    let first = lines.first().ok_or_else(|| {
        err(
            text.lines().count().max(1),
            ParseErrorKind::MissingQubitCount,
        )
    })?;
    if first.tokens.len() != 1 {
        return Err(err(
            first.number,
            ParseErrorKind::BadQubitCount(first.tokens.join(" ")),
        ));
    }
    let num_qubits: usize = first.tokens[0].parse().map_err(|_| {
        err(
            first.number,
            ParseErrorKind::BadQubitCount(first.tokens[0].into()),
        )
    })?;
    let mut circuit = Circuit::new(num_qubits).map_err(|e| err(first.number, e.into()))?;

    let mut custom: HashMap<String, Arc<CustomGate>> = HashMap::new();
    let mut measured = vec![false; num_qubits];
    let mut i = 1;
    while i < lines.len() {
        let line = &lines[i];
        let n = line.number;
        let head = line.tokens[0];
        i += 1;

        if head.eq_ignore_ascii_case("DEF") || head.eq_ignore_ascii_case("KRAUS") {
            let is_kraus = head.eq_ignore_ascii_case("KRAUS");
            let header_len = if is_kraus { 4 } else { 3 };
            if line.tokens.len() < header_len {
                return Err(err(
                    n,
                    ParseErrorKind::BadDefinition("incomplete header".into()),
                ));
            }
            let name = line.tokens[1];
            if is_reserved(name) || custom.contains_key(name) || name.contains(',') {
                return Err(err(
                    n,
                    ParseErrorKind::BadDefinition(format!("name {name:?} is reserved or taken")),
                ));
            }
            let arity: usize = match line.tokens[2] {
                "1" => 1,
                "2" => 2,
                other => {
                    return Err(err(
                        n,
                        ParseErrorKind::BadDefinition(format!("arity {other:?} must be 1 or 2")),
                    ))
                }
            };
            let count: usize = if is_kraus {
                line.tokens[3]
                    .parse()
                    .ok()
                    .filter(|&c| c > 0)
                    .ok_or_else(|| {
                        err(
                            n,
                            ParseErrorKind::BadDefinition("bad operator count".into()),
                        )
                    })?
            } else {
                0
            };
            // entries continue on following lines that start with an entry token
            let mut entries = Vec::new();
            for tok in &line.tokens[header_len..] {
                entries.push(parse_entry(tok, n)?);
            }
            while i < lines.len() && lines[i].tokens[0].contains(',') {
                for tok in &lines[i].tokens {
                    entries.push(parse_entry(tok, lines[i].number)?);
                }
                i += 1;
            }
            let hilbert = 1usize << arity;
            let gate = if is_kraus {
                let per = hilbert * hilbert;
                if entries.len() != per * count {
                    return Err(err(
                        n,
                        ParseErrorKind::BadDefinition(format!(
                            "expected {} entries, got {}",
                            per * count,
                            entries.len()
                        )),
                    ));
                }
                let ops = entries
                    .chunks(per)
                    .map(|c| CMatrix::new(hilbert, c.to_vec()))
                    .collect();
                let channel = KrausChannel::new(ops).map_err(|e| err(n, e.into()))?;
                CustomGate::kraus(name, channel)
            } else if entries.len() == hilbert * hilbert {
                CustomGate::unitary(name, CMatrix::new(hilbert, entries))
                    .map_err(|e| err(n, e.into()))?
            } else if entries.len() == hilbert.pow(4) {
                CustomGate::superoperator(name, CMatrix::new(hilbert * hilbert, entries))
                    .map_err(|e| err(n, e.into()))?
            } else {
                return Err(err(
                    n,
                    ParseErrorKind::BadDefinition(format!(
                        "expected {} or {} entries, got {}",
                        hilbert * hilbert,
                        hilbert.pow(4),
                        entries.len()
                    )),
                ));
            };
            custom.insert(name.to_string(), Arc::new(gate));
            continue;
        }

        if let Some(kind) = Measurement::from_keyword(head) {
            if line.tokens.len() != 2 {
                return Err(err(
                    n,
                    ParseErrorKind::OperandCount {
                        expected: 1,
                        got: line.tokens.len() - 1,
                    },
                ));
            }
            let q = parse_qubit(line.tokens[1], n)?;
            circuit.measure(q, kind).map_err(|e| err(n, e.into()))?;
            if std::mem::replace(&mut measured[q], true) {
                return Err(err(n, ParseErrorKind::DuplicateMeasurement(q)));
            }
            continue;
        }

        let operands = &line.tokens[1..];
        let (gate, qubit_tokens) = if let Some(g) = custom.get(head) {
            (Gate::Custom(g.clone()), operands)
        } else {
            match builtin_takes_param(head) {
                None => return Err(err(n, ParseErrorKind::UnknownGate(head.to_string()))),
                Some(false) => (builtin(head, None).unwrap(), operands),
                Some(true) => {
                    let tok = operands
                        .first()
                        .ok_or_else(|| err(n, ParseErrorKind::MalformedParam(String::new())))?;
                    let theta: f64 = tok
                        .parse()
                        .ok()
                        .filter(|t: &f64| t.is_finite())
                        .ok_or_else(|| err(n, ParseErrorKind::MalformedParam(tok.to_string())))?;
                    (builtin(head, Some(theta)).unwrap(), &operands[1..])
                }
            }
        };
        if qubit_tokens.len() != gate.arity() {
            return Err(err(
                n,
                ParseErrorKind::OperandCount {
                    expected: gate.arity(),
                    got: qubit_tokens.len(),
                },
            ));
        }
        let qubits = qubit_tokens
            .iter()
            .map(|t| parse_qubit(t, n))
            .collect::<Result<Vec<_>, _>>()?;
        circuit.push(gate, &qubits).map_err(|e| err(n, e.into()))?;
    }
    Ok(circuit)
}
