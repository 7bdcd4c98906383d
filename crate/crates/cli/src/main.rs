//! `kal`: build and verify set systems, lower-bound certificates, rounding
//! checks and extended formulations.
//!
//! Exit codes: 0 every verdict passed, 1 a verdict failed, 2 usage or
//! parameter error, 3 resource budget exceeded.

mod commands;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kal::Error;

#[derive(Parser, Debug)]
#[command(
    name = "kal",
    version,
    about = "Exact knapsack approximation certificates"
)]
struct Cli {
    /// Worker threads for independent checks (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Format of the summary printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the polynomial set system over F_p and verify its properties.
    Nw(NwArgs),
    /// Build and verify the witness certificate for the lower-bound instance.
    Certify(CertifyArgs),
    /// Re-verify a certificate written by `certify`.
    Check(CheckArgs),
    /// Certify the coefficient-rounding approximation on given or random polytopes.
    Round(RoundArgs),
    /// Build the disjunctive extended formulation and compare LP and IP optima.
    Extension(ExtensionArgs),
    /// Summarize (and, for certificates, re-check) previously written outputs.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct NwArgs {
    #[arg(long)]
    pub prime: u64,
    /// Degree bound; defaults to floor(p/2 - 4).
    #[arg(long)]
    pub degree: Option<u64>,
    /// `all` or `sample:<count>`.
    #[arg(long, default_value = "all")]
    pub pairs: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub prime: u64,
    /// Exact rational, e.g. `1/16`.
    #[arg(long)]
    pub epsilon: String,
    #[arg(long, default_value = "all")]
    pub pairs: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Accept parameters outside the proven regime (verdicts may fail).
    #[arg(long)]
    pub relaxed: bool,
    /// Degree override, relaxed mode only.
    #[arg(long, requires = "relaxed")]
    pub degree: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub certificate: PathBuf,
}

#[derive(Args, Debug)]
pub struct RoundArgs {
    /// Knapsack instance file.
    #[arg(long, group = "source")]
    pub instance: Option<PathBuf>,
    /// Down-monotone system file.
    #[arg(long, group = "source")]
    pub system: Option<PathBuf>,
    /// Use the lower-bound instance for this root `p`.
    #[arg(long, group = "source")]
    pub lowerbound: Option<u64>,
    /// Random polytopes of this dimension, one per trial.
    #[arg(long, group = "source")]
    pub n: Option<usize>,
    /// Instance epsilon for `--lowerbound` (defaults to `--epsilon`).
    #[arg(long, requires = "lowerbound")]
    pub lowerbound_epsilon: Option<String>,
    /// Scheme epsilon, exact rational in (0, 1/2].
    #[arg(long)]
    pub epsilon: String,
    /// Single objective file (JSON list of rationals) instead of random trials.
    #[arg(long)]
    pub objective: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also compute the exhaustive and integer-grid oracles (tiny n only).
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtensionArgs {
    /// Root of the instance, `n = p²`.
    #[arg(long, group = "size", required_unless_present = "n")]
    pub prime: Option<u64>,
    /// Number of light items (a perfect square).
    #[arg(long, group = "size")]
    pub n: Option<usize>,
    #[arg(long)]
    pub epsilon: String,
    /// Skip the parameter regime checks for `--prime`.
    #[arg(long)]
    pub relaxed: bool,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also enumerate extension vertices and test hull membership (tiny n, e.g. 4).
    #[arg(long)]
    pub hull: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

/// Outcome of a command before it is mapped to an exit code.
pub enum Outcome {
    Pass,
    Fail,
}

fn exit_code(result: Result<Outcome, Error>) -> ExitCode {
    match result {
        Ok(Outcome::Pass) => ExitCode::from(0),
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) if e.is_budget() => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Nw(args) => commands::nw(args, cli.format),
        Command::Certify(args) => commands::certify(args, cli.format),
        Command::Check(args) => commands::check(args, cli.format),
        Command::Round(args) => commands::round(args, cli.format),
        Command::Extension(args) => commands::extension(args, cli.format),
        Command::Report(args) => commands::report(args, cli.format),
    };
    exit_code(result)
}
