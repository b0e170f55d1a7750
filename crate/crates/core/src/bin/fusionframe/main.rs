//! `fusionframe` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or usage error,
//! 3 perturbation hypothesis violated.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fusionframe::perturbation::WeightStrategy;
use fusionframe::suites::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "fusionframe",
    version,
    about = "Fusion frame bounds, subspace angles and operator perturbation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Comparison tolerance for inequality checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Relative singular-value cutoff (scaled by max(rows, cols) * sigma_max).
    #[arg(long, global = true, default_value_t = f64::EPSILON)]
    pub rank_tol: f64,
    /// Default seed for randomized runs that do not name one.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the per-index table as CSV to this path.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame bounds and classification of an instance.
    Analyze {
        /// Instance JSON, or `-` for stdin.
        instance: PathBuf,
        /// Add the pairwise angle and gap table.
        #[arg(long)]
        angles: bool,
        /// Also run the perturbation pipeline with default bounds.
        #[arg(long)]
        perturb: bool,
    },
    /// Construct new weights and check the perturbed family's bounds.
    Perturb {
        /// Instance JSON with an operator, or `-` for stdin.
        instance: PathBuf,
        /// Target lower bound; requires --B.
        #[arg(long = "A", value_name = "A")]
        a: Option<f64>,
        /// Target upper bound; alone it sets A = c*B.
        #[arg(long = "B", value_name = "B")]
        b: Option<f64>,
        /// geometric_mid, lower_edge or upper_edge.
        #[arg(long, default_value = "geometric_mid")]
        strategy: WeightStrategy,
    },
    /// Run a verifier on an instance or on seeded random instances.
    Verify {
        /// Instance JSON with an operator, or `-` for stdin.
        instance: Option<PathBuf>,
        /// Random run, e.g. `dim=8,trials=500,seed=7`.
        #[arg(long, value_name = "SPEC", conflicts_with = "instance")]
        random: Option<String>,
        /// prop24, thm25, cor26 or thm32.
        #[arg(long)]
        suite: Suite,
    },
    /// Write the truncated block example as an instance.
    Example {
        /// Number of blocks K; the ambient dimension is 3K + 1.
        #[arg(long, default_value_t = 1)]
        blocks: usize,
        /// Angle of the first block, below pi/4; block k uses theta0 / 2^k.
        #[arg(long, default_value_t = fusionframe::instances::DEFAULT_THETA0)]
        theta0: f64,
        /// Write the condition constant and lower bounds for 1..=blocks as CSV.
        #[arg(long, value_name = "PATH")]
        plot: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                commands::EXIT_INPUT
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(cli))
}
