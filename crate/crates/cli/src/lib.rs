//! `hecke-mod`: characteristic polynomials of Hecke operators on level-one
//! cusp forms, their root tables mod small primes, trace checks, and Galois
//! certificates, from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error, 3 a tabulated
//! congruence or divisibility failed to hold.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_core::{CharpolyCache, Engine};

mod commands;
mod render;

pub use commands::execute;

pub const CACHE_ENV: &str = "HECKE_MOD_CACHE";

#[derive(Debug, Parser)]
#[command(name = "hecke-mod", version, about = "Hecke polynomials mod small primes and Galois certificates")]
pub struct Cli {
    /// Directory for the characteristic polynomial cache (overridden by HECKE_MOD_CACHE).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Seed for the randomized factorization steps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic polynomial of T_p on weight-k cusp forms, optionally factored mod l.
    Charpoly(CharpolyArgs),
    /// Root-sequence table for l = 5, 7 or 13.
    Table(TableArgs),
    /// Trace of T_n on weight-k cusp forms from the trace formula.
    Trace(TraceArgs),
    /// Period of the root sequence of T_p mod l along a weight class.
    Period(PeriodArgs),
    /// Irreducibility and Galois group certificates.
    Certify(CertifyArgs),
    /// Transfer irreducibility and full Galois group from a certified T_n to T_p.
    Deduce(DeduceArgs),
}

#[derive(Debug, Args)]
pub struct CharpolyArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub weight: u32,
    #[arg(long)]
    pub ell: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long, conflicts_with = "single_period")]
    pub max_weight: Option<u32>,
    /// Compute one period's worth of terms and skip period detection.
    #[arg(long)]
    pub single_period: bool,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub weight: u32,
    #[arg(long)]
    pub ell: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PeriodArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub ell: u64,
    #[arg(long)]
    pub kclass: u32,
    #[arg(long)]
    pub max_weight: Option<u32>,
    /// Also report the period of tr T_p mod l in the weight.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, requires = "weight", required_unless_present = "poly")]
    pub prime: Option<u64>,
    #[arg(long, requires = "prime")]
    pub weight: Option<u32>,
    /// Monic integer polynomial, coefficients ascending and comma separated.
    #[arg(long, conflicts_with_all = ["prime", "weight"], allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub bound: u64,
    /// Stop at irreducibility.
    #[arg(long)]
    pub irreducible_only: bool,
}

#[derive(Debug, Args)]
pub struct DeduceArgs {
    #[arg(long)]
    pub weight: u32,
    #[arg(long, required_unless_present = "below")]
    pub target_prime: Option<u64>,
    /// Every prime below this bound instead of a single target.
    #[arg(long, conflicts_with = "target_prime")]
    pub below: Option<u64>,
    /// Index n whose certificate discharges the hypothesis.
    #[arg(long, default_value_t = 2)]
    pub witness: u64,
    #[arg(long, default_value_t = 200)]
    pub bound: u64,
    /// Leave the conclusions conditional.
    #[arg(long)]
    pub no_discharge: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hecke_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_usage() => 1,
            CliError::Core(e) if e.is_falsification() => 3,
            _ => 2,
        }
    }
}

impl Cli {
    /// Engine with the cache directory from the environment or the flag.
    pub fn engine(&self) -> Result<Engine, CliError> {
        let dir = std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| self.cache_dir.clone());
        let cache = match dir {
            Some(d) => CharpolyCache::persistent(d)?,
            None => CharpolyCache::in_memory(),
        };
        Ok(Engine::new(cache).with_seed(self.seed))
    }
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
