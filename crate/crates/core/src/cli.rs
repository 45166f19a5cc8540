//! Command-line front end: `simulate`, `plan`, `qaoa-gen`, `answer-string`,
//! `harness` and `oracle`.
//!
//! Exit codes: 0 success, 1 bad input (parse errors name the line),
//! 2 memory guard (names the contraction step), 3 vanishing branch.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{parse_circuit, Circuit, ParseError};
use crate::engine::{self, PlannerKind, SimConfig, SimError};
use crate::network::{NetworkError, TensorNetwork};
use crate::oracle::{oracle_expectation, oracle_simulate, OracleError};
use crate::ordering::{
    plan_from_ordering, Budget, ContractionPlan, EliminationOrdering, OrderingError, PlanError,
    DEFAULT_RESTARTS,
};
use crate::qaoa::{
    answer_string_for_circuit, edge_observable, expectation_of_cut, product_state_harness,
    qaoa_circuit, random_regular_graph, ring_plus_chords, AnswerError, HarnessError, InstanceError,
    MaxCutInstance, QaoaError, QaoaParams,
};
use crate::tensor::{ContractOptions, DEFAULT_PARALLEL_THRESHOLD, DEFAULT_RANK_CAP};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Ordering {
        path: PathBuf,
        source: OrderingError,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Qaoa(#[from] QaoaError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("memory guard: {0}")]
    MemoryGuard(NetworkError),
    #[error(transparent)]
    Sim(SimError),
    #[error(transparent)]
    VanishingBranch(AnswerError),
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MemoryGuard(_) => 2,
            CliError::VanishingBranch(_) => 3,
            _ => 1,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Network(n @ NetworkError::RankCap { .. }) => CliError::MemoryGuard(n),
            other => CliError::Sim(other),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        SimError::from(e).into()
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        SimError::from(e).into()
    }
}

impl From<AnswerError> for CliError {
    fn from(e: AnswerError) -> Self {
        match e {
            AnswerError::Sim(s) => s.into(),
            v => CliError::VanishingBranch(v),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Oracle(o) => o.into(),
            HarnessError::Answer(a) => a.into(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Jsonl,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlannerArg {
    Lg,
    Stoch,
}

impl From<PlannerArg> for PlannerKind {
    fn from(p: PlannerArg) -> Self {
        match p {
            PlannerArg::Lg => PlannerKind::LineGraph,
            PlannerArg::Stoch => PlannerKind::Stochastic,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Uniform random connected k-regular graph.
    Regular,
    /// Ring plus random chords up to degree 3.
    RingChords,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[arg(long, value_enum, default_value = "lg", global = true)]
    pub planner: PlannerArg,
    /// Worker threads for large contractions.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    pub threads: u64,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Line-graph planner budget: restarts, or seconds with an `s` suffix.
    #[arg(long, value_parser = parse_budget, global = true)]
    pub budget: Option<Budget>,
    /// Stochastic planner patience; defaults to twice the wire count.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    pub max_rejections: Option<u64>,
    /// Largest tensor rank that may be materialized.
    #[arg(long, default_value_t = DEFAULT_RANK_CAP as u64, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    pub rank_cap: u64,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    let bad =
        || format!("budget must be a positive restart count or seconds like `2.5s`, got `{s}`");
    if let Some(secs) = s.strip_suffix('s') {
        let v: f64 = secs.parse().map_err(|_| bad())?;
        return (v > 0.0 && v.is_finite())
            .then_some(Budget::Seconds(v))
            .ok_or_else(bad);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Budget::Restarts(n)),
        _ => Err(bad()),
    }
}

impl RunConfig {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            planner: self.planner.into(),
            seed: self.seed,
            budget: self.budget.unwrap_or(Budget::Restarts(DEFAULT_RESTARTS)),
            max_rejections: self.max_rejections.map(|m| m as usize),
            contract: ContractOptions {
                threads: self.threads as usize,
                parallel_threshold: DEFAULT_PARALLEL_THRESHOLD,
                rank_cap: self.rank_cap as usize,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "tncircuit",
    version,
    about = "Exact tensor-network simulation of quantum circuits"
)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Contract a circuit file to its expectation value.
    Simulate {
        circuit: PathBuf,
        /// Execute this line-graph ordering instead of planning.
        #[arg(long)]
        ordering_file: Option<PathBuf>,
    },
    /// Plan a contraction without touching tensor data.
    Plan {
        circuit: PathBuf,
        /// Evaluate an external line-graph ordering instead of planning.
        #[arg(long)]
        ordering_file: Option<PathBuf>,
        /// Write the serialized ordering here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a Max-Cut instance and its QAOA circuit.
    QaoaGen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Comma-separated, one per round; zeros when omitted.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        gammas: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        betas: Vec<f64>,
        #[arg(long, value_enum, default_value = "regular")]
        family: Family,
        #[arg(long)]
        graph_out: PathBuf,
        #[arg(long)]
        circuit_out: PathBuf,
        /// Also write one circuit per edge, measuring Z on its endpoints.
        #[arg(long)]
        edges_dir: Option<PathBuf>,
        /// Contract every edge and report the expected cut.
        #[arg(long)]
        evaluate: bool,
    },
    /// Estimate a likely output string qubit by qubit.
    AnswerString { circuit: PathBuf },
    /// Score the answer-string heuristic on random QAOA-like unitaries.
    Harness {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Write `trial,rank,l1` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Brute-force density-matrix reference value.
    Oracle {
        circuit: PathBuf,
        /// Also print the computational-basis distribution.
        #[arg(long)]
        distribution: bool,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_circuit(path: &Path) -> Result<Circuit, CliError> {
    parse_circuit(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_ordering(path: &Path, net: &TensorNetwork) -> Result<ContractionPlan, CliError> {
    let ordering_err = |source| CliError::Ordering {
        path: path.to_path_buf(),
        source,
    };
    let ord = EliminationOrdering::parse(&read(path)?).map_err(ordering_err)?;
    plan_from_ordering(net, &ord).map_err(|e| match e {
        PlanError::Ordering(o) => ordering_err(o),
        other => other.into(),
    })
}

/// Wire positions of a plan, in elimination order.
fn serialized_order(net: &TensorNetwork, plan: &ContractionPlan) -> String {
    let positions = plan
        .order
        .iter()
        .map(|&w| {
            net.wire_position(w)
                .expect("plan wires belong to the network")
        })
        .collect();
    EliminationOrdering(positions).serialize()
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    let line = serde_json::to_string(value).expect("reports serialize");
    writeln!(out, "{line}")?;
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport {
    re: f64,
    im: f64,
    flops: u128,
    peak_rank: usize,
    width: Option<usize>,
    planner: String,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct PlanReport {
    width: Option<usize>,
    predicted_flops: u128,
    predicted_peak_rank: usize,
    wires: usize,
    planner: String,
    ordering: String,
}

#[derive(Serialize)]
struct QaoaGenReport {
    vertices: usize,
    edges: usize,
    gates: usize,
    expected_cut: Option<f64>,
}

#[derive(Serialize)]
struct StepReport {
    qubit: usize,
    p0: f64,
    p1: f64,
    bit: u8,
    tie: bool,
}

#[derive(Serialize)]
struct AnswerReport {
    bits: String,
    probability: f64,
    contractions: usize,
}

#[derive(Serialize)]
struct TrialReport {
    trial: usize,
    rank: usize,
    l1: f64,
    bits: String,
}

#[derive(Serialize)]
struct HarnessSummary {
    trials: usize,
    fraction_top_tenth: f64,
    fraction_l1_below_0_15: f64,
    median_l1: f64,
}

#[derive(Serialize)]
struct OracleReport {
    re: f64,
    im: f64,
    distribution: Option<Vec<f64>>,
}

fn fmt_width(w: Option<usize>) -> String {
    w.map_or_else(|| "-".to_string(), |w| w.to_string())
}

/// Runs one command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = cli.run.sim_config();
    let jsonl = cli.run.format == Format::Jsonl;
    match &cli.command {
        Command::Simulate {
            circuit,
            ordering_file,
        } => {
            let c = load_circuit(circuit)?;
            let start = Instant::now();
            let net = TensorNetwork::from_circuit(&c);
            let plan = match ordering_file {
                Some(path) => load_ordering(path, &net)?,
                None => engine::plan(&net, &cfg)?,
            };
            let exec = net.execute(&plan.order, &cfg.contract)?;
            let report = SimulateReport {
                re: exec.value.re,
                im: exec.value.im,
                flops: exec.cost.flops,
                peak_rank: exec.cost.peak_rank,
                width: plan.width,
                planner: cfg.planner.to_string(),
                wall_time_s: start.elapsed().as_secs_f64(),
            };
            if jsonl {
                emit(out, &report)?;
            } else {
                writeln!(out, "value: {:.12} {:+.3e}i", report.re, report.im)?;
                writeln!(out, "flops: {}", report.flops)?;
                writeln!(out, "peak rank: {}", report.peak_rank)?;
                writeln!(out, "width: {}", fmt_width(report.width))?;
                writeln!(out, "planner: {}", report.planner)?;
                writeln!(out, "wall time: {:.3}s", report.wall_time_s)?;
            }
        }
        Command::Plan {
            circuit,
            ordering_file,
            output,
        } => {
            let net = TensorNetwork::from_circuit(&load_circuit(circuit)?);
            let plan = match ordering_file {
                Some(path) => load_ordering(path, &net)?,
                None => engine::plan(&net, &cfg)?,
            };
            let report = PlanReport {
                width: plan.width,
                predicted_flops: plan.predicted_flops,
                predicted_peak_rank: plan.predicted_peak_rank,
                wires: net.wire_count(),
                planner: if ordering_file.is_some() {
                    "file".to_string()
                } else {
                    cfg.planner.to_string()
                },
                ordering: serialized_order(&net, &plan),
            };
            if let Some(path) = output {
                write_file(path, &format!("{}\n", report.ordering))?;
            }
            if jsonl {
                emit(out, &report)?;
            } else {
                writeln!(out, "width: {}", fmt_width(report.width))?;
                writeln!(out, "predicted flops: {}", report.predicted_flops)?;
                writeln!(out, "predicted peak rank: {}", report.predicted_peak_rank)?;
                writeln!(out, "wires: {}", report.wires)?;
                writeln!(out, "ordering: {}", report.ordering)?;
            }
        }
        Command::QaoaGen {
            n,
            k,
            p,
            gammas,
            betas,
            family,
            graph_out,
            circuit_out,
            edges_dir,
            evaluate,
        } => {
            let angles = |v: &Vec<f64>, name: &str| -> Result<Vec<f64>, CliError> {
                match v.len() {
                    0 => Ok(vec![0.0; *p]),
                    len if len == *p => Ok(v.clone()),
                    len => Err(CliError::Usage(format!("{len} {name} given for p = {p}"))),
                }
            };
            let params = QaoaParams::new(angles(gammas, "gammas")?, angles(betas, "betas")?)?;
            let inst: MaxCutInstance = match family {
                Family::Regular => random_regular_graph(*n, *k, cli.run.seed)?,
                Family::RingChords => ring_plus_chords(*n, cli.run.seed)?,
            };
            let circuit = qaoa_circuit(&inst, &params);
            write_file(graph_out, &inst.to_text())?;
            write_file(circuit_out, &circuit.to_text())?;
            if let Some(dir) = edges_dir {
                fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.clone(),
                    source,
                })?;
                for (u, v) in inst.edges() {
                    let text = edge_observable(&circuit, (u, v)).to_text();
                    write_file(&dir.join(format!("edge_{u}_{v}.circ")), &text)?;
                }
            }
            let expected_cut = if *evaluate {
                Some(expectation_of_cut(&inst, &params, &cfg)?)
            } else {
                None
            };
            let report = QaoaGenReport {
                vertices: inst.num_vertices(),
                edges: inst.edges().len(),
                gates: circuit.ops().len(),
                expected_cut,
            };
            if jsonl {
                emit(out, &report)?;
            } else {
                writeln!(out, "edges: {}", report.edges)?;
                writeln!(out, "gates: {}", report.gates)?;
                if let Some(c) = report.expected_cut {
                    writeln!(out, "expected cut: {c:.12}")?;
                }
            }
        }
        Command::AnswerString { circuit } => {
            let c = load_circuit(circuit)?;
            let answer = answer_string_for_circuit(&c, &cfg)?;
            let extra = usize::from(!c.is_trace_preserving());
            let report = AnswerReport {
                bits: answer.bits.to_string(),
                probability: answer.probability,
                contractions: c.num_qubits() + extra,
            };
            if jsonl {
                for s in &answer.steps {
                    emit(
                        out,
                        &StepReport {
                            qubit: s.qubit,
                            p0: s.p0,
                            p1: s.p1,
                            bit: s.bit,
                            tie: s.tie,
                        },
                    )?;
                }
                emit(out, &report)?;
            } else {
                for s in &answer.steps {
                    let tie = if s.tie { " (tie)" } else { "" };
                    writeln!(
                        out,
                        "qubit {}: p0 {:.12} p1 {:.12} -> {}{tie}",
                        s.qubit, s.p0, s.p1, s.bit
                    )?;
                }
                writeln!(out, "answer: {}", report.bits)?;
                writeln!(out, "probability: {:.12}", report.probability)?;
            }
        }
        Command::Harness {
            n,
            m,
            p,
            trials,
            csv,
        } => {
            let report = product_state_harness(*n, *m, *p, *trials, cli.run.seed)?;
            if let Some(path) = csv {
                write_file(path, &report.to_csv())?;
            }
            let mut l1: Vec<f64> = report.results.iter().map(|r| r.l1).collect();
            l1.sort_by(f64::total_cmp);
            let summary = HarnessSummary {
                trials: *trials,
                fraction_top_tenth: report.fraction_rank_below(0.1 * (1u64 << n) as f64),
                fraction_l1_below_0_15: report.fraction_l1_below(0.15),
                median_l1: l1.get(l1.len() / 2).copied().unwrap_or(0.0),
            };
            if jsonl {
                for r in &report.results {
                    emit(
                        out,
                        &TrialReport {
                            trial: r.trial,
                            rank: r.rank,
                            l1: r.l1,
                            bits: r.answer.bits.to_string(),
                        },
                    )?;
                }
                emit(out, &summary)?;
            } else {
                if csv.is_none() {
                    write!(out, "{}", report.to_csv())?;
                }
                writeln!(out, "# trials: {}", summary.trials)?;
                writeln!(
                    out,
                    "# rank in top tenth: {:.4}",
                    summary.fraction_top_tenth
                )?;
                writeln!(
                    out,
                    "# l1 below 0.15: {:.4}",
                    summary.fraction_l1_below_0_15
                )?;
                writeln!(out, "# median l1: {:.4}", summary.median_l1)?;
            }
        }
        Command::Oracle {
            circuit,
            distribution,
        } => {
            let c = load_circuit(circuit)?;
            let value = oracle_expectation(&c)?;
            let dist = if *distribution {
                Some(oracle_simulate(&c)?.distribution())
            } else {
                None
            };
            let report = OracleReport {
                re: value.re,
                im: value.im,
                distribution: dist,
            };
            if jsonl {
                emit(out, &report)?;
            } else {
                writeln!(out, "value: {:.12} {:+.3e}i", report.re, report.im)?;
                if let Some(d) = &report.distribution {
                    let n = c.num_qubits();
                    for (i, p) in d.iter().enumerate() {
                        writeln!(out, "{:0n$b} {p:.12}", i)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs, prints errors to stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(()) => 0,
        Err(CliError::Output(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets() {
        assert_eq!(parse_budget("12"), Ok(Budget::Restarts(12)));
        assert_eq!(parse_budget("2.5s"), Ok(Budget::Seconds(2.5)));
        assert!(parse_budget("0").is_err());
        assert!(parse_budget("-1s").is_err());
        assert!(parse_budget("ten").is_err());
    }

    #[test]
    fn flags_reach_the_config() {
        let cli = Cli::try_parse_from([
            "tncircuit",
            "--planner",
            "stoch",
            "--threads",
            "2",
            "--seed",
            "7",
            "--budget",
            "4",
            "--max-rejections",
            "9",
            "--rank-cap",
            "11",
            "--format",
            "jsonl",
            "simulate",
            "x.circ",
        ])
        .unwrap();
        let cfg = cli.run.sim_config();
        assert_eq!(cfg.planner, PlannerKind::Stochastic);
        assert_eq!(cfg.contract.threads, 2);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.budget, Budget::Restarts(4));
        assert_eq!(cfg.max_rejections, Some(9));
        assert_eq!(cfg.contract.rank_cap, 11);
        assert_eq!(cli.run.format, Format::Jsonl);
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["tncircuit", "simulate", "x.circ"]).unwrap();
        let cfg = cli.run.sim_config();
        assert_eq!(cfg, SimConfig::default());
    }

    #[test]
    fn bad_flags_exit_one() {
        assert_eq!(
            main_with_args(["tncircuit", "--threads", "0", "simulate", "x"]),
            1
        );
        assert_eq!(
            main_with_args(["tncircuit", "--planner", "qbb", "plan", "x"]),
            1
        );
    }
}
