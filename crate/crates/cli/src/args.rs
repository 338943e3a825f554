use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "hamcore", version, about = "Random min-degree graphs, k-cores and Hamilton cycle packings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a graph and write it as an edge list (or JSON).
    Generate(GenerateArgs),
    /// Pack Hamilton cycles into a graph file and validate the certificate.
    Pack(PackArgs),
    /// Run seeded trials and write a CSV plus a JSON summary.
    Experiment(ExperimentArgs),
    /// Check a certificate or an expansion property of a graph.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Uniform graph with n vertices, m edges and minimum degree k.
    GnmMindeg,
    /// The random graph process.
    Process,
}

#[derive(Args, Clone, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "gnm-mindeg")]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    /// Edge density; sets m = round(c n) when --m is absent.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Process model: stop at the first step with a non-empty k-core.
    #[arg(long)]
    pub until_tau_k: Option<usize>,
    /// Process model: number of steps.
    #[arg(long)]
    pub t: Option<usize>,
    /// Write the JSON graph format.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Clone, Debug)]
pub struct PackFlags {
    #[arg(long)]
    pub k: usize,
    /// Edge density m/n; inferred from the graph when absent.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub reservoir_fraction: Option<f64>,
    #[arg(long)]
    pub depth_cap: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Args, Clone, Debug)]
pub struct PackArgs {
    /// Graph file (edge list or JSON).
    pub input: PathBuf,
    #[command(flatten)]
    pub flags: PackFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Certificate output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct ExperimentArgs {
    #[arg(long, value_enum, default_value = "gnm-mindeg")]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub flags: PackFlags,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// CSV output; the summary goes next to it as `<stem>.summary.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Process model checkpoints, comma separated: `tau`, `1.1tau`,
    /// `nlogn` or step counts.
    #[arg(long)]
    pub checkpoints: Option<String>,
    /// Leave the `ms` column empty so the CSV depends only on the seed.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Certificate,
    Density,
    Incidence,
    Expansion,
    Params,
}

#[derive(Args, Clone, Debug)]
pub struct VerifyArgs {
    /// Graph file (edge list or JSON).
    pub graph: PathBuf,
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Use local search even where exhaustive search is possible.
    #[arg(long)]
    pub sampled: bool,
    /// Skip the k-parity and cycle-count checks.
    #[arg(long)]
    pub standalone: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
