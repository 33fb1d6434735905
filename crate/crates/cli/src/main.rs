//! `pointpush` command-line front end.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pointpush::config::BUDGET_ENV;
use pointpush::{Config, Error};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "pointpush", version, about = "Entropy efficiency of point-push stirring protocols")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Relative tolerance for spectral radii.
    #[arg(long, global = true)]
    pub spectral_tol: Option<f64>,
    /// Unit-circle tolerance for root classification.
    #[arg(long, global = true)]
    pub eps_unit: Option<f64>,
    /// Maximum number of ordered products in brute-force enumeration.
    /// Defaults to POINTPUSH_BUDGET when set.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Maximum reduced word length during growth iteration.
    #[arg(long, global = true)]
    pub length_cap: Option<usize>,
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound chain for N obstacles.
    Bounds(commands::BoundsArgs),
    /// Bound chains for a range of N.
    Table(commands::TableArgs),
    /// Print a generator, product or representation matrix.
    Matrix(commands::MatrixArgs),
    /// Word-growth entropy estimate with spectral cross-checks.
    Entropy(commands::EntropyArgs),
    /// Brute-force generalized spectral radius of the incidence matrices.
    Gsr(commands::GsrArgs),
    /// Spectral radius and root-pattern classification of H or Hhat.
    Classify(commands::ClassifyArgs),
    /// Run the identity suite.
    Verify(commands::VerifyArgs),
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
    Budget(String),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::IndexOutOfRange { .. }
            | Error::ZeroIndex
            | Error::BadSign(_)
            | Error::RankMismatch { .. }
            | Error::TooFewObstacles { .. }
            | Error::BadToken(_)
            | Error::EmptyProtocol
            | Error::NoIterations
            | Error::InvalidRange(_) => Failure::Usage(e.to_string()),
            Error::OrderingViolation { .. } | Error::NotTransposeClosed => Failure::Verification(e.to_string()),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

impl GlobalOpts {
    pub fn config(&self) -> Result<Config, Failure> {
        let mut cfg = Config::from_env();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            if v.trim().parse::<u128>().is_err() {
                return Err(Failure::Usage(format!("{BUDGET_ENV} must be a positive integer, got `{v}`")));
            }
        }
        if let Some(t) = self.spectral_tol {
            cfg.spectral_tol = t;
        }
        if let Some(e) = self.eps_unit {
            cfg.eps_unit = e;
        }
        if let Some(b) = self.budget {
            cfg.product_budget = b;
        }
        if let Some(c) = self.length_cap {
            cfg.length_cap = c;
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(cfg.spectral_tol) || !positive(cfg.eps_unit) {
            return Err(Failure::Usage("tolerances must be positive".into()));
        }
        if cfg.product_budget == 0 || cfg.length_cap == 0 {
            return Err(Failure::Usage("budgets must be positive".into()));
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Other(e.into()))?;
    }
    let cfg = g.config()?;
    let doc = match &cli.command {
        Command::Bounds(a) => commands::bounds(a, &cfg)?,
        Command::Table(a) => commands::table(a, &cfg)?,
        Command::Matrix(a) => commands::matrix(a, &cfg)?,
        Command::Entropy(a) => commands::entropy(a, &cfg)?,
        Command::Gsr(a) => commands::gsr(a, &cfg)?,
        Command::Classify(a) => commands::classify(a, &cfg)?,
        Command::Verify(a) => commands::verify(a, &cfg)?,
    };
    output::emit(&doc, g)?;
    Ok(if doc.passed { EXIT_OK } else { EXIT_VERIFY })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, format!("usage error: {m}")),
                Failure::Verification(m) => (EXIT_VERIFY, format!("verification failed: {m}")),
                Failure::Budget(m) => (EXIT_BUDGET, format!("budget exceeded: {m}")),
                Failure::Other(e) => (EXIT_VERIFY, format!("error: {e:#}")),
            };
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
