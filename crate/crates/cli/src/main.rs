//! `tdchan`: command-line access to channel outputs, spectra, entropies and
//! the inequality scans.
//!
//! Exit codes: 0 success, 1 violation found, 2 usage error, 3 input
//! validation error. Output is assembled in full before anything is printed.

mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;
use tdchan::LogBase;

#[derive(Debug, Parser)]
#[command(name = "tdchan", version, about = "Transpose depolarizing channel toolkit")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (0 or unset: all cores).
    #[arg(long, global = true, env = "TDCHAN_THREADS")]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Base::E)]
    pub log_base: Base,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Optimizer convergence tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Base {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

impl From<Base> for LogBase {
    fn from(b: Base) -> Self {
        match b {
            Base::E => LogBase::E,
            Base::Two => LogBase::Two,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the channel to a density matrix read from JSON.
    Apply {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// JSON file `{"dim": n, "rows": [[[re, im], ...], ...]}`; `-` reads stdin.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Closed-form two-copy output spectrum with a dense cross-check.
    Spectrum {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Exit 1 when the dense cross-check differs by more than this.
        #[arg(long, default_value_t = 1e-9)]
        max_delta: f64,
    },
    /// Two-copy output entropy and its split into off-diagonal and secular parts.
    Entropy {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Single-copy minimum output entropy.
    MinEntropy {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Additivity gap for one `t` or a grid `a:b:steps`.
    Additivity {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        /// Exit 1 when any gap falls below minus this.
        #[arg(long, default_value_t = 1e-6)]
        gap_tol: f64,
    },
    /// Schur criterion and `S₂` T-transform scans.
    SchurScan {
        /// Dimension or inclusive range `a:b`.
        #[arg(long)]
        d: String,
        #[arg(long, allow_hyphen_values = true)]
        t_grid: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Inequality scans; one report per (kind, d, t).
    Verify {
        /// A scan kind or `all`.
        #[arg(long, default_value = "all")]
        kind: String,
        /// Dimension or inclusive range `a:b`.
        #[arg(long)]
        d: String,
        #[arg(long, allow_hyphen_values = true)]
        t_grid: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub hermitian_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub trace_tol: f64,
    /// Smallest eigenvalue accepted as positive semidefinite.
    #[arg(long, default_value_t = -1e-10, allow_hyphen_values = true)]
    pub psd_floor: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    /// Random bipartite states sampled for the two-copy minimum.
    #[arg(long, default_value_t = 200)]
    pub n_random: usize,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 3,
        }
    }
}

impl From<tdchan::Error> for Failure {
    fn from(e: tdchan::Error) -> Self {
        use tdchan::Error::*;
        match e {
            BadDimension(_) | OutOfRange { .. } | BadT { .. } | BadK { .. } | ZeroT | BadLength { .. } | Config(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| commands::run(&cli)) {
        Ok((report, violated)) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(if violated { 1 } else { 0 })
        }
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Validation(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
