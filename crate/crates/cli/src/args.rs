use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Krylov basis experiments: sketch-and-select Arnoldi, sketched GMRES and
/// conditioning bounds. Every subcommand writes CSV.
#[derive(Debug, Parser)]
#[command(name = "ssa", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Condition number of the basis as it grows, per method.
    BuildBasis(RunArgs),
    /// GMRES next to sketched GMRES on one problem.
    Sgmres(RunArgs),
    /// Basis dimension reached below the threshold over problems × methods,
    /// summarized as a performance profile.
    PerfProfile(RunArgs),
    /// Conditioning bounds on random trials, plus the worst-case decay series.
    BoundsDemo(RunArgs),
    /// Subset selection on the fixed 4×3 counterexample basis.
    SelectDemo(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BuildBasis(_) => "build-basis",
            Command::Sgmres(_) => "sgmres",
            Command::PerfProfile(_) => "perf-profile",
            Command::BoundsDemo(_) => "bounds-demo",
            Command::SelectDemo(_) => "select-demo",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::BuildBasis(a)
            | Command::Sgmres(a)
            | Command::PerfProfile(a)
            | Command::BoundsDemo(a)
            | Command::SelectDemo(a) => a,
        }
    }
}

/// Flags shared by all subcommands. Each one overrides the same key in the
/// `--config` file; unset keys fall back to per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with any of the keys below (underscores for dashes).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Matrix Market file (repeatable).
    #[arg(long)]
    pub matrix: Vec<PathBuf>,
    /// Generated matrix `name:p1,p2,..` (repeatable), e.g. `conv_diff_2d:64,100`.
    #[arg(long)]
    pub generate: Vec<String>,
    /// gaussian[:seed] | e1 | e1pert[:delta] | ones | file:<path>
    #[arg(long)]
    pub rhs: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Arnoldi iterations, so the basis grows to m+1 vectors (bounds-demo: columns of V).
    #[arg(long)]
    pub m: Option<usize>,
    /// Truncation / selection parameter.
    #[arg(long)]
    pub k: Option<usize>,
    /// Sketch dimension.
    #[arg(long)]
    pub s: Option<usize>,
    /// Comma-separated methods; `name@cap` limits that method to a basis of `cap` vectors.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Comma-separated selection strategies (added as `ssa-<name>` methods).
    #[arg(long, value_delimiter = ',')]
    pub strategy: Vec<String>,
    /// srht | gaussian | identity
    #[arg(long)]
    pub sketch: Option<String>,
    #[arg(long)]
    pub cond_threshold: Option<f64>,
    #[arg(long)]
    pub cond_check_stride: Option<usize>,
    /// Relative residual tolerance (sgmres).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Form the true residual every this many iterations (sgmres).
    #[arg(long)]
    pub resid_stride: Option<usize>,
    /// Do not stop sGMRES when the basis condition number exceeds the threshold.
    #[arg(long)]
    pub ignore_cond: bool,
    /// Random trials (bounds-demo).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Rows of the random bases (bounds-demo).
    #[arg(long)]
    pub rows: Option<usize>,
    /// Length of the decay series (bounds-demo).
    #[arg(long)]
    pub decay_steps: Option<usize>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Decay series output (bounds-demo); defaults to `<out stem>.decay.csv`.
    #[arg(long)]
    pub decay_out: Option<PathBuf>,
    /// Per-run metric table (perf-profile).
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
}
