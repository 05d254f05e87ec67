#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod parse;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Config;
use crate::output::Format;

/// Generate quasi-uniform point sets, measure them, and verify the packing,
/// lens-volume and approximation-error inequalities of scaled Shepard
/// quasi-interpolation.
///
/// Exit status: 0 on success, 1 when a checked inequality is violated,
/// 2 on invalid input.
#[derive(Debug, Parser)]
#[command(name = "shepard", version)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file. Relative paths are resolved against SHEPARD_OUTPUT_DIR
    /// when it is set. Without this flag the report goes to stdout, or to
    /// `$SHEPARD_OUTPUT_DIR/<command>.<format>` when the variable is set.
    #[arg(long, short, global = true)]
    pub output: Option<String>,

    /// Seed for every random choice (sampling, Monte Carlo, centers).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// JSON file with default values for any flag (keys are flag names with
    /// underscores). Explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a point set (CSV with header x1..xd).
    Gen(GenArgs),
    /// Separation radius, fill distance and the implied uniformity constants.
    Metrics(MetricsArgs),
    /// Count points in concentric annuli and check both packing bounds.
    Annuli(AnnuliArgs),
    /// Compare closed-form lens volumes with quadrature and Monte Carlo.
    LensCheck(LensArgs),
    /// Fit the operator to a test function and check the error estimate.
    Approximate(ApproxArgs),
    /// Convergence study over a list of sizes.
    Converge(ConvergeArgs),
    /// Print the explicit constants.
    Constants(ConstantsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Grid,
    Hex,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelName {
    Imq,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// Target number of points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension (ignored for hex, which is planar).
    #[arg(long)]
    pub d: Option<usize>,
    /// Poisson-disk minimum distance (overrides the radius derived from n).
    #[arg(long)]
    pub min_dist: Option<f64>,
    /// Domain, `box:lo1,hi1,lo2,hi2,...` or `ball:c1,...,cd,r`.
    #[arg(long)]
    pub domain: Option<String>,
}

#[derive(Debug, Args)]
pub struct PointsInput {
    /// Point-set CSV.
    #[arg(long)]
    pub points: Option<String>,
    /// Domain; defaults to the `<points>.domain.json` sidecar written by
    /// `gen`, else the bounding box of the points.
    #[arg(long)]
    pub domain: Option<String>,
    /// Probe spacing for the fill distance (default: q/4).
    #[arg(long)]
    pub probe_resolution: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: PointsInput,
}

#[derive(Debug, Args)]
pub struct AnnuliArgs {
    #[command(flatten)]
    pub input: PointsInput,
    /// Number of random centers drawn in the domain.
    #[arg(long)]
    pub centers: Option<usize>,
    /// Explicit center `x1,...,xd` (repeatable); replaces random centers.
    #[arg(long = "center")]
    pub center: Vec<String>,
}

#[derive(Debug, Args)]
pub struct LensArgs {
    #[arg(long)]
    pub d: Option<u32>,
    /// Number of r/R values, k/grid for k = 1..grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Monte Carlo samples per configuration.
    #[arg(long)]
    pub mc: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// `constant:v`, `affine:a1,...,ad,b`, `distance:x1,...,xd`,
    /// `ball:c1,...,cd,r` or `sine:k`. Default: distance to the domain center.
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelName>,
    /// Decay exponent; default (d+2)/2 + 1/2.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fixed fill constant C (default: measured h n^{1/d}).
    #[arg(long = "C")]
    pub big_c: Option<f64>,
    /// Probe points for the sup error and the normalizer checks.
    #[arg(long)]
    pub probes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub input: PointsInput,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Write the fitted model as JSON here.
    #[arg(long)]
    pub export: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated sizes.
    #[arg(long)]
    pub n_list: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "C")]
    pub big_c: Option<f64>,
}

/// How a run ended.
#[derive(Debug)]
pub enum Failure {
    /// A verified inequality failed; the report was still written.
    Violation(usize),
    Usage(String),
    /// The reader closed stdout (e.g. `| head`).
    Closed,
}

impl From<shepard_core::Error> for Failure {
    fn from(e: shepard_core::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Self::Closed;
        }
        Self::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Config::load(cli.config.as_deref()).and_then(|cfg| commands::run(&cli, &cfg));
    match result {
        Ok(()) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(Failure::Violation(count)) => {
            eprintln!("shepard: {count} inequality violation(s); see the report");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("shepard: {msg}");
            ExitCode::from(2)
        }
    }
}
