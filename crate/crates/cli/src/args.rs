//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "wanderlab", version, about = "Checks, experiments and renders for a quasiregular map with wandering domains")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// γ = log R_1 [default: 1.1 × gamma_threshold(max-level)]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Disk radius factor δ [default: 0.01]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Deepest materialized level [default: 20]
    #[arg(long, global = true)]
    pub max_level: Option<usize>,
    /// Boundary samples per sampled check [default: 256]
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Significand bits of the wide reals [default: 64, env: WANDERLAB_SIG_BITS]
    #[arg(long, global = true)]
    pub sig_bits: Option<usize>,
    /// Parameter file with `key: value` lines
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write a JSON run manifest here
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the inequality suite, disk chain and band-visit checks
    Verify {
        /// JSON report path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate a point and dump the orbit as CSV
    Orbit {
        /// `L<level>:<s>:<theta>`, `xi:<n>`, `ann:<n>` or `0`
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a point as fast escaping, escaping or bounded
    Escape {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 30)]
        budget: usize,
    },
    /// Tabulate an experiment as CSV
    Experiment {
        #[command(subcommand)]
        kind: Experiment,
    },
    /// Render a log-polar raster of one level as binary PPM
    Render {
        #[arg(long, default_value_t = 3)]
        level: usize,
        /// `region`, `levels:<steps>` or `disk[:<delta>]`
        #[arg(long, default_value = "region")]
        coloring: String,
        #[arg(long, default_value_t = 1024)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-pixel tags as CSV
        #[arg(long)]
        tags_csv: Option<PathBuf>,
    },
    /// Print the admissibility thresholds for γ and δ
    Threshold {
        /// Bisection tolerance for γ
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// log|h_n| along an orbit
    Hn {
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// `disk:<l>`, `ann:<s>:<theta>` or `ann` (middle of ann(T_m, P_{m+1}))
        #[arg(long, default_value = "ann", allow_hyphen_values = true)]
        probe: String,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hyperbolic-length lower bounds and measured windings
    Growth {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Dilatation constant K in the bound
        #[arg(long = "K", default_value_t = 4.0)]
        dilatation: f64,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 1 << 20)]
        refine_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured dilatation of the interpolation bands
    Dilatation {
        #[arg(long, default_value_t = 2)]
        from: usize,
        #[arg(long, default_value_t = 12)]
        to: usize,
        #[arg(long, default_value_t = 64)]
        radial: usize,
        #[arg(long, default_value_t = 64)]
        angular: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
