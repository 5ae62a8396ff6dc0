//! Command-line surface. Each command returns a [`Report`]; `main` prints it.
//!
//! Exit statuses: 0 success, 1 analysis precondition violated, 2 malformed
//! input, 3 resource or generation failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::error::{MachineError, OracleError, RateError};
use crate::format::parse_machine;
use crate::generate::{random_machine, RandomMachineParams, DEFAULT_MAX_ATTEMPTS};
use crate::linalg::DEFAULT_SPECTRAL_TOL;
use crate::machine::EpsilonMachine;
use crate::oracle::{
    exact_word_stats_with, regression_slope, reset_threshold, simulate_beliefs, summarize,
    EnumerationOptions, DEFAULT_BUDGET,
};
use crate::pair_space::{DeadlockAnalysis, PairAutomaton};
use crate::rates::{analyze, nsyn_bounds, sync_rate};
use crate::report::Report;

/// Largest machine for which `classify` also runs the subset search for `rt`.
const RT_MAX_STATES: usize = 16;

#[derive(Debug, Parser)]
#[command(
    name = "emsync",
    version,
    about = "Synchronization measures of epsilon-machines"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Human, global = true)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Kv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a machine file.
    Validate { path: PathBuf },
    /// Exact / non-exact classification with deadlock details.
    Classify { path: PathBuf },
    /// Synchronization rate constant of an exact machine.
    SyncRate {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Prediction rate constant, per-component expectations and escape rate.
    PredRate {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SPECTRAL_TOL)]
        eps: f64,
    },
    /// Bounds on the probability of non-reset words of a given length.
    Bounds {
        path: PathBuf,
        #[arg(long)]
        length: usize,
        /// Also compute the exact value by enumerating all words.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Monte Carlo simulation of the observer's uncertainty.
    Simulate {
        path: PathBuf,
        #[arg(long, required_unless_present = "sweep")]
        length: Option<usize>,
        /// Sweep lengths `start:end:step` and fit the decay slope of ln(median Q_L).
        #[arg(long, conflicts_with = "length")]
        sweep: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Generate a random machine.
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        symbols: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: usize,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 1,
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<MachineError> for CliError {
    fn from(e: MachineError) -> Self {
        match e {
            MachineError::GenerationFailed { .. } | MachineError::Solve(_) => {
                CliError::Resource(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<RateError> for CliError {
    fn from(e: RateError) -> Self {
        match e {
            RateError::NonExact { .. } => CliError::Precondition(e.to_string()),
            RateError::Accuracy { .. } | RateError::Solve(_) => CliError::Resource(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Machine(inner) => inner.into(),
            OracleError::BudgetExceeded { .. } | OracleError::CapExceeded { .. } => {
                CliError::Resource(e.to_string())
            }
            OracleError::ImpossibleWord | OracleError::DistributionLength { .. } => {
                CliError::Precondition(e.to_string())
            }
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Report(Report),
    /// Raw text, e.g. a generated machine written to standard output.
    Text(String),
}

impl Output {
    pub fn render(&self, format: OutputFormat) -> String {
        match self {
            Output::Report(r) => match format {
                OutputFormat::Human => r.render_human(),
                OutputFormat::Kv => r.render_kv(),
            },
            Output::Text(t) => t.clone(),
        }
    }
}

pub fn load_machine(path: &Path) -> Result<EpsilonMachine, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_machine(&text).map_err(|e| match CliError::from(e) {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn run(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Validate { path } => cmd_validate(path).map(Output::Report),
        Command::Classify { path } => cmd_classify(path).map(Output::Report),
        Command::SyncRate { path, eps } => cmd_sync_rate(path, *eps).map(Output::Report),
        Command::PredRate { path, eps } => cmd_pred_rate(path, *eps).map(Output::Report),
        Command::Bounds {
            path,
            length,
            oracle,
            budget,
        } => cmd_bounds(path, *length, *oracle, *budget).map(Output::Report),
        Command::Simulate {
            path,
            length,
            sweep,
            runs,
            seed,
        } => {
            let lengths = match (length, sweep) {
                (_, Some(spec)) => parse_sweep(spec)?,
                (Some(l), None) => vec![*l],
                (None, None) => return Err(CliError::Input("need --length or --sweep".into())),
            };
            cmd_simulate(path, &lengths, sweep.is_some(), *runs, *seed).map(Output::Report)
        }
        Command::Gen {
            states,
            symbols,
            density,
            seed,
            max_attempts,
            out,
        } => {
            let params = RandomMachineParams {
                states: *states,
                symbols: *symbols,
                density: *density,
                seed: *seed,
                max_attempts: *max_attempts,
            };
            cmd_gen(&params, out.as_deref())
        }
    }
}

pub fn cmd_validate(path: &Path) -> Result<Report, CliError> {
    let m = load_machine(path)?;
    let pa = PairAutomaton::build(&m);
    let da = DeadlockAnalysis::analyze(&m, &pa);
    let mut r = Report::new();
    r.push("name", m.name());
    r.push("states", m.num_states().to_string());
    r.push("symbols", m.num_symbols().to_string());
    r.push("edges", m.num_edges().to_string());
    r.push("classification", da.classification().as_str());
    Ok(r)
}

pub fn cmd_classify(path: &Path) -> Result<Report, CliError> {
    let m = load_machine(path)?;
    let pa = PairAutomaton::build(&m);
    let da = DeadlockAnalysis::analyze(&m, &pa);
    let mut r = Report::new();
    r.push("classification", da.classification().as_str());
    r.push("pairs", pa.len().to_string());
    r.push("deadlock_pairs", da.deadlock.len().to_string());
    r.push("components", da.components.len().to_string());
    if let Some(w) = da.witness() {
        let p = pa.pair(w);
        r.push(
            "witness",
            format!("({}, {})", m.state_name(p.first), m.state_name(p.second)),
        );
    }
    if m.num_states() <= RT_MAX_STATES {
        let rt = reset_threshold(&m, usize::MAX)?;
        r.push("rt", rt.map_or("none".to_string(), |v| v.to_string()));
    }
    Ok(r)
}

pub fn cmd_sync_rate(path: &Path, eps: f64) -> Result<Report, CliError> {
    if !(eps > 0.0) {
        return Err(CliError::Input("--eps must be positive".into()));
    }
    let m = load_machine(path)?;
    let src = sync_rate(&m, eps)?;
    let mut r = Report::new();
    r.push_number("src", src);
    r.push_number("eps", eps);
    if src == 0.0 {
        // every long enough word resets; the constant degenerates to 0
        r.push("src.zero", "yes");
    }
    Ok(r)
}

pub fn cmd_pred_rate(path: &Path, eps: f64) -> Result<Report, CliError> {
    if !(eps > 0.0) {
        return Err(CliError::Input("--eps must be positive".into()));
    }
    let m = load_machine(path)?;
    let report = analyze(&m, eps)?;
    let mut r = Report::new();
    r.push("classification", report.classification.as_str());
    r.push_number("prc", report.prc);
    r.push("components", report.components.len().to_string());
    for (i, c) in report.components.iter().enumerate() {
        r.push_number(format!("e_m.{i}"), c.expectation);
    }
    r.push_number("escape", report.escape);
    Ok(r)
}

pub fn cmd_bounds(
    path: &Path,
    length: usize,
    oracle: bool,
    budget: u128,
) -> Result<Report, CliError> {
    let m = load_machine(path)?;
    let bounds = nsyn_bounds(&m, length)?;
    let mut r = Report::new();
    r.push("length", length.to_string());
    r.push_number("nsyn.lower", bounds.lower);
    if oracle {
        let opts = EnumerationOptions {
            budget,
            keep_words: false,
        };
        let stats = exact_word_stats_with(&m, length, &opts)?;
        r.push_number("nsyn.exact", stats.nsyn_probability);
    }
    r.push_number("nsyn.upper", bounds.upper);
    Ok(r)
}

/// Parses `start:end:step` into the inclusive list of lengths.
pub fn parse_sweep(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Input(format!("bad sweep `{spec}`, expected start:end:step"));
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| p.trim().parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if step == 0 || start > end {
        return Err(bad());
    }
    Ok((start..=end).step_by(step).collect())
}

pub fn cmd_simulate(
    path: &Path,
    lengths: &[usize],
    sweep: bool,
    runs: usize,
    seed: u64,
) -> Result<Report, CliError> {
    if runs == 0 {
        return Err(CliError::Input("--runs must be at least 1".into()));
    }
    let m = load_machine(path)?;
    let mut r = Report::new();
    r.push("runs", runs.to_string());
    r.push("seed", seed.to_string());

    if !sweep {
        let length = lengths[0];
        let sim = simulate_beliefs(&m, length, runs, seed)?;
        let s = summarize(&sim.q_l);
        r.push("length", length.to_string());
        r.push_number("q.mean", s.mean);
        r.push_number("q.stderr", s.std_error);
        r.push_number("q.median", s.median);
        r.push_number("q.p10", s.p10);
        r.push_number("q.p90", s.p90);
        r.push_number("q.zero_fraction", s.zero_fraction);
        let pa = PairAutomaton::build(&m);
        let da = DeadlockAnalysis::analyze(&m, &pa);
        for c in 0..da.components.len() {
            let ys: Vec<f64> = sim
                .log_ratios
                .iter()
                .filter(|y| y.component == Some(c))
                .map(|y| y.mean_log_ratio)
                .collect();
            if !ys.is_empty() {
                r.push(format!("ybar.{c}.count"), ys.len().to_string());
                r.push_number(format!("ybar.{c}.mean"), summarize(&ys).mean);
            }
        }
        return Ok(r);
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut all_positive = true;
    for &length in lengths {
        let sim = simulate_beliefs(&m, length, runs, seed)?;
        let median = summarize(&sim.q_l).median;
        r.push_number(format!("median.{length}"), median);
        xs.push(length as f64);
        if median > 0.0 {
            ys.push(median.ln());
        } else {
            all_positive = false;
        }
    }
    if all_positive && xs.len() >= 2 {
        let slope = regression_slope(&xs, &ys);
        r.push_number("slope", slope);
        r.push_number("rate", slope.exp());
    } else {
        r.push("slope", "undefined");
    }
    Ok(r)
}

pub fn cmd_gen(params: &RandomMachineParams, out: Option<&Path>) -> Result<Output, CliError> {
    let m = random_machine(params)?;
    let text = m.render();
    match out {
        None => Ok(Output::Text(text)),
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| CliError::Resource(format!("{}: {e}", path.display())))?;
            let mut r = Report::new();
            r.push("path", path.display().to_string());
            r.push("states", m.num_states().to_string());
            r.push("symbols", m.num_symbols().to_string());
            r.push("edges", m.num_edges().to_string());
            Ok(Output::Report(r))
        }
    }
}
