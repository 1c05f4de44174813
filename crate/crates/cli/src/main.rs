//! Command-line front end for the signed-graph learning toolkit.
//!
//! Five subcommands tie generation, solving and evaluation into
//! file-based, reproducible pipelines:
//!
//! - `generate`: draw a planted signed graph and smooth signals to disk;
//! - `learn`: recover a signed graph from a signal matrix file;
//! - `experiment`: run repeats × parameter grid and aggregate metrics
//!   into a plot-ready CSV;
//! - `bench`: measure solver wall time per iteration across graph sizes;
//! - `eval`: score a recovered pair file against a ground-truth graph.
//!
//! Every run is driven by a TOML config (see [`config`]) whose random
//! draws all derive from a single root seed, and every artifact carries
//! the SHA-256 digest of its manifest so outputs can be traced back to
//! the exact parameters that produced them. Failures map to distinct
//! exit codes with a final machine-readable JSON line on stderr.

mod bench;
mod config;
mod eval;
mod experiment;
mod generate;
mod learn;
mod manifest;
mod tables;

use std::env;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Failure classes, each with its own exit code so scripts can react
/// without parsing prose:
///
/// - 2: configuration or schema violations (bad TOML, unknown keys,
///   parameters outside their domains, inconsistent flags);
/// - 3: file I/O and input parsing (missing files, corrupt data rows);
/// - 4: the solver cannot run or broke down (infeasible size, divergence);
/// - 5: the solve finished without meeting its tolerances.
#[derive(Debug)]
pub enum Failure {
    /// Invalid configuration; exit code 2.
    Schema(String),
    /// Unreadable, unwritable or unparsable files; exit code 3.
    Io(String),
    /// The solver rejected the problem or failed numerically; exit code 4.
    Solver(String),
    /// The iteration cap was reached before the tolerances; exit code 5.
    NotConverged(String),
}

impl Failure {
    /// Buckets a library error by what the caller can do about it:
    /// input-file problems are I/O, parameter-domain and dimension
    /// problems are schema, everything numeric is the solver's.
    pub fn from_core(err: signet::Error) -> Self {
        use signet::Error;
        match &err {
            Error::Parse { .. } | Error::Io { .. } => Failure::Io(err.to_string()),
            Error::NotSquare { .. }
            | Error::NotSymmetric { .. }
            | Error::InvalidPair { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter { .. }
            | Error::InvalidEdge { .. } => Failure::Schema(err.to_string()),
            _ => Failure::Solver(err.to_string()),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Schema(_) => "schema",
            Failure::Io(_) => "io",
            Failure::Solver(_) => "solver",
            Failure::NotConverged(_) => "not-converged",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Schema(m)
            | Failure::Io(m)
            | Failure::Solver(m)
            | Failure::NotConverged(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Schema(_) => 2,
            Failure::Io(_) => 3,
            Failure::Solver(_) => 4,
            Failure::NotConverged(_) => 5,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "signet-cli",
    version,
    about = "Reproducible pipelines for learning signed graphs from smooth signals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one planted dataset (truth graph + signal matrix) to disk.
    Generate(generate::GenerateArgs),
    /// Recover a signed graph from a signal matrix file.
    Learn(learn::LearnArgs),
    /// Run repeats × parameter grid and aggregate metrics into a CSV.
    Experiment(experiment::ExperimentArgs),
    /// Time the solvers at fixed iteration counts across graph sizes.
    Bench(bench::BenchArgs),
    /// Score a recovered pair file against a ground-truth graph.
    Eval(eval::EvalArgs),
}

/// Applies the `SIGNET_THREADS` override to the global worker pool.
/// Unset, the pool sizes itself (rayon also honors `RAYON_NUM_THREADS`).
fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = env::var("SIGNET_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|t| *t >= 1)
        .ok_or_else(|| {
            Failure::Schema(format!(
                "SIGNET_THREADS must be a positive integer, found `{raw}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Schema(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_threads()?;
    match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Learn(args) => learn::run(args),
        Command::Experiment(args) => experiment::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Eval(args) => eval::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            // One JSON object on the last stderr line: machine-readable
            // reason paired with the exit code.
            eprintln!(
                "{}",
                serde_json::json!({
                    "kind": failure.kind(),
                    "message": failure.message(),
                })
            );
            ExitCode::from(failure.exit_code())
        }
    }
}
