//! `apweights`: A_p analysis of weights, shift certificates for polynomial
//! symbols, and certified periodic solves.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use apweights_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "apweights", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sampled A_p constant and critical exponent of a weight.
    Analyze(AnalyzeArgs),
    /// Search for a shift avoiding small divisors and write its certificate.
    Shift(ShiftArgs),
    /// Solve the conjugated equation for a grid function and write u.
    Solve(SolveArgs),
    /// Check a persisted solution against the certified estimate.
    Verify(VerifyArgs),
    /// Run the whole pipeline on the built-in examples.
    Example(ExampleArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AnalyzeArgs {
    /// Weight document.
    #[arg(long, required_unless_present = "poly", conflicts_with = "poly")]
    pub weight: Option<PathBuf>,
    /// Polynomial document; analyzes the weight |P|.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    /// Also report the sampled supremum at this exponent.
    #[arg(long)]
    pub p: Option<f64>,
    /// Quadrature nodes per axis (default depends on the dimension).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Bisection tolerance of the critical exponent.
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShiftArgs {
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long)]
    pub p: f64,
    /// Lattice window M (sup norm).
    #[arg(long, default_value_t = 50)]
    pub window: u32,
    /// Candidate grid points per axis.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolveArgs {
    /// Certificate written by `shift`.
    #[arg(long)]
    pub cert: PathBuf,
    /// Right-hand side f.
    #[arg(long)]
    pub grid: PathBuf,
    /// Sobolev indices checked in the report.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0"
    )]
    pub rho: Vec<f64>,
    /// Smallest admissible divisor modulus (default 1e-12 max |P| on the grid).
    #[arg(long)]
    pub eps_min: Option<f64>,
    /// Where to write the solution u; the report goes to --report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long)]
    pub grid: PathBuf,
    /// Solution u written by `solve`.
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0"
    )]
    pub rho: Vec<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExampleArgs {
    /// Extra products of powers, e.g. `--m 3` or `--m 2,2`.
    #[arg(long = "m")]
    pub m: Vec<String>,
    #[arg(long, default_value_t = 50)]
    pub window: u32,
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

/// Malformed command-line values that clap itself cannot reject.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A run that completed but whose verdict is FAIL.
#[derive(Debug)]
pub struct Failed(pub String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

/// 2 parse failure, 3 never finite, 4 no admissible shift, 5 small divisor,
/// 1 anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Format(_) | Error::WrongDomainTag { .. } => 2,
                Error::NeverFinite { .. } => 3,
                Error::AllShiftsBad => 4,
                Error::SmallDivisorBreach { .. } => 5,
                _ => 1,
            };
        }
        if cause.is::<UsageError>() || cause.is::<serde_json::Error>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Shift(a) => commands::shift(a),
        Command::Solve(a) => commands::solve(a),
        Command::Verify(a) => commands::verify(a),
        Command::Example(a) => commands::example(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(Error::SmallDivisorBreach { modes, eps_min }) =
                e.chain().find_map(|c| c.downcast_ref::<Error>())
            {
                eprintln!("divisor modulus below {eps_min:e} at modes:");
                for m in modes {
                    eprintln!("  {m:?}");
                }
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
