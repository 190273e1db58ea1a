//! `hnoma`: experiments and checks for two-user hybrid NOMA power allocation.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hnoma_core::simulation::RateCase;
use hnoma_core::{ModelError, RateTarget};

#[derive(Debug, Parser)]
#[command(
    name = "hnoma",
    version,
    about = "Power allocation checks for two-user hybrid NOMA"
)]
struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true, env = "HNOMA_SEED", default_value_t = 7)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and print the OMA, hybrid NOMA and optimal allocations.
    Solve {
        #[arg(long)]
        h1: f64,
        #[arg(long)]
        h2: f64,
        #[command(flatten)]
        rate: RateArg,
        /// Print a JSON record instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Check KKT certificates on random instances.
    KktCheck {
        #[arg(long, default_value_t = 1_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Rates in nats; trials cycle through them.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,3")]
        rates: Vec<f64>,
    },
    /// Compare the solver with the joint grid oracle on random instances.
    OracleCheck {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 400)]
        grid_n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,3")]
        rates: Vec<f64>,
        /// Largest accepted relative gap between oracle and solver totals.
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
    },
    /// Average total power against SNR.
    SweepSnr {
        /// Per-user channel variance in dB.
        #[arg(long, value_delimiter = ',', default_value = "0,5,10,15,20,25,30")]
        rho_db: Vec<f64>,
        #[command(flatten)]
        rate: RateArg,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average total power against the target rate.
    SweepRate {
        #[arg(long, value_enum)]
        case: CaseArg,
        /// Rates in nats.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2,2.5,3")]
        rates: Vec<f64>,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search over user 1's slot-1 power on random realizations.
    Fig4 {
        #[command(flatten)]
        rate: RateArg,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        realizations: u64,
        #[arg(long, default_value_t = 10_000)]
        grid_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write user 1's objective along a uniform grid per realization.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
        trace_points: u64,
    },
    /// Search for a point where the Hessian of user 1's constraint function is not PSD.
    HessianScan {
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        draws: u64,
        /// Report the first point whose smallest eigenvalue is at or below this.
        #[arg(long, default_value_t = -1e-6, allow_negative_numbers = true)]
        threshold: f64,
    },
}

#[derive(Debug, Clone, Copy, Args)]
#[group(required = false, multiple = false)]
struct RateArg {
    /// Target rate per user in nats per channel use.
    #[arg(long)]
    rate: Option<f64>,
    /// Target rate per user in bits per channel use.
    #[arg(long)]
    rate_bits: Option<f64>,
}

impl RateArg {
    fn resolve(self, default_nats: f64) -> Result<RateTarget, ModelError> {
        match (self.rate, self.rate_bits) {
            (_, Some(bits)) => RateTarget::from_bits(bits),
            (Some(nats), None) => RateTarget::new(nats),
            (None, None) => RateTarget::new(default_nats),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CaseArg {
    #[value(name = "I", alias = "i", alias = "1")]
    One,
    #[value(name = "II", alias = "ii", alias = "2")]
    Two,
}

impl From<CaseArg> for RateCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::One => RateCase::CaseI,
            CaseArg::Two => RateCase::CaseII,
        }
    }
}

/// How a command ended short of success.
#[derive(Debug)]
enum Failure {
    /// Bad input; exit code 2.
    Usage(String),
    /// A check ran and did not pass; exit code 1.
    Check(String),
    /// Anything else, e.g. I/O; exit code 1.
    Other(anyhow::Error),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, cli.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
