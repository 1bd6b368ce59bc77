//! Command-line surface. Every tuning flag is optional here; defaults and
//! config-file values are folded in by `spec::RunPlan::assemble`, with
//! flags winning over the file.

use clap::{Args, Parser, Subcommand};
use dqaoa_core::decompose::Strategy;
use dqaoa_orchestrator::Transport;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "dqaoa",
    version,
    about = "Distributed-QAOA experiment harness: generate instances, run solve campaigns, sweep hyperparameters, profile cycle phases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a problem instance to a file.
    Generate(GenerateArgs),
    /// Run repeated trials on one instance; emit a per-cycle CSV and a
    /// summary JSON.
    Solve(SolveArgs),
    /// Cartesian sweep over sub-problem size/count, worker count, and
    /// strategy; one CSV row per cell per trial.
    Sweep(SweepArgs),
    /// Mean per-cycle phase timings across problem sizes; one CSV row
    /// per size.
    Profile(ProfileArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Instance family: dense | maxcut.
    #[arg(long)]
    pub kind: String,
    /// Number of variables (vertices for maxcut).
    #[arg(long)]
    pub n: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file path.
    #[arg(long)]
    pub out: PathBuf,
}

/// Flags shared by solve, sweep, and profile. All optional so a config
/// file can supply them; see `RunPlan::assemble` for precedence.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Problem: a file path, or a generator spec `dense:N[:seed]` /
    /// `maxcut:N[:seed]`.
    #[arg(long)]
    pub problem: Option<String>,
    /// JSON config file with the same keys as these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Decomposition strategy: random | ifd | bfs | pfs.
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Variables per sub-problem (k).
    #[arg(long)]
    pub sub_size: Option<usize>,
    /// Sub-problems per cycle (m).
    #[arg(long)]
    pub num_sub: Option<usize>,
    /// Ranking-window step for the ifd strategy.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Significance cutoff for bfs/pfs edges (default: median |coupling|).
    #[arg(long)]
    pub edge_threshold: Option<f64>,
    /// Worker pool size.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Worker transport: in-process | local-socket.
    #[arg(long)]
    pub transport: Option<Transport>,
    /// Independent trials per configuration.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; trial t runs with master seed `seed + t`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reference energy for approximation ratios (skips the built-in
    /// exact/annealed baseline).
    #[arg(long, allow_hyphen_values = true)]
    pub reference: Option<f64>,
    /// Hard cap on cycles per run.
    #[arg(long)]
    pub max_cycles: Option<usize>,
    /// Convergence tolerance in A.R. percentage points.
    #[arg(long)]
    pub ar_tol: Option<f64>,
    /// Consecutive small A.R. steps required to declare convergence.
    #[arg(long)]
    pub ar_window: Option<usize>,
    /// Measurements per sub-problem solve.
    #[arg(long)]
    pub shots: Option<usize>,
    /// Objective-evaluation budget for the angle search.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Cost/mixer rounds in the circuit.
    #[arg(long)]
    pub layers: Option<usize>,
    /// Output stem: writes `<stem>.csv` (and `<stem>.json` for solve).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the first cycle's decomposition plan as JSON.
    #[arg(long)]
    pub dump_plan: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Sub-problem sizes to sweep (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub sub_sizes: Vec<usize>,
    /// Sub-problem counts to sweep (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub num_subs: Vec<usize>,
    /// Worker counts to sweep (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub workers_list: Vec<usize>,
    /// Strategies to sweep (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub strategies: Vec<Strategy>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Problem sizes to profile (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Instance family: dense | maxcut.
    #[arg(long)]
    pub kind: Option<String>,
}
