//! Argument definitions. Every subcommand option is optional at the parser
//! level so that a config file can supply it; [`crate::config`] merges the
//! two and reports what is still missing.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "repeatcap",
    version,
    about = "Capacity upper bounds for repeat channels"
)]
pub struct Cli {
    /// TOML file supplying defaults for any option; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Omit version and timestamp metadata so that output is reproducible.
    #[arg(long, global = true)]
    pub no_meta: bool,

    /// Report bounds in nats instead of bits.
    #[arg(long, global = true)]
    pub nats: bool,

    /// Worker threads for sweeps, verification and simulation.
    #[arg(long, global = true, env = "REPEATCAP_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one capacity upper bound.
    Bound(BoundArgs),
    /// Compute bounds over a grid of p values and write CSV.
    Sweep(SweepArgs),
    /// Recompute the reference tables and compare.
    Verify(VerifyArgs),
    /// Write the KL-gap profile of a dual as CSV.
    Klgap(KlgapArgs),
    /// Monte Carlo run of the Poisson-repeat channel with run-length decoding.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Sticky,
    Duplication,
    Geomdel,
}

impl FamilyArg {
    pub fn name(self) -> &'static str {
        match self {
            FamilyArg::Sticky => "sticky",
            FamilyArg::Duplication => "duplication",
            FamilyArg::Geomdel => "geomdel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Sticky,
    Duplication,
    Conv,
    Trunc,
    DeltaD,
    Elementary,
    /// The smallest of conv, trunc and delta-d.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Replication parameter in (0, 1)
    #[arg(long)]
    pub p: Option<f64>,
    /// Defaults to the family's own bound, or `auto` for geomdel.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// For geomdel the default emits conv, trunc and delta-d rows plus a
    /// `min` row per p.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// First p of the grid
    #[arg(long)]
    pub p_start: Option<f64>,
    /// Last p of the grid
    #[arg(long)]
    pub p_end: Option<f64>,
    /// Number of evenly spaced points, endpoints included.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Explicit comma-separated grid, used instead of start/end/steps.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub p_values: Option<Vec<f64>>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write the objective as a function of q at this p instead of a sweep.
    #[arg(long, value_name = "P")]
    pub emit_inner: Option<f64>,
    /// Grid points for `--emit-inner`.
    #[arg(long)]
    pub inner_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// Restrict to one table: T1, T2 or T3.
    #[arg(long)]
    pub only: Option<String>,
    /// One absolute tolerance in bits for every entry.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Add DELTA bits to the computed value of the entry LABEL, e.g.
    /// `--perturb "T2 p=0.3 upper=0.01"`. Repeatable.
    #[arg(long, value_name = "LABEL=DELTA")]
    pub perturb: Vec<String>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapVariantArg {
    Conv,
    Trunc,
    Invbin,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KlgapArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Replication parameter in (0, 1)
    #[arg(long)]
    pub p: Option<f64>,
    /// Dual parameter in (0, 1)
    #[arg(long)]
    pub q: Option<f64>,
    /// Deletion dual; defaults to trunc.
    #[arg(long, value_enum)]
    pub variant: Option<GapVariantArg>,
    /// Mass at zero: `one`, `rule` (the variant's own choice), `d`, or a
    /// number in (0, 1].
    #[arg(long)]
    pub delta_rule: Option<String>,
    /// Largest input run length (default 500)
    #[arg(long)]
    pub x_max: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// Input length in bits (default 2000)
    #[arg(long)]
    pub n: Option<usize>,
    /// Mean number of copies per bit (default 200)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// A trial succeeds when the edit distance is at most eps * n (default 0.1)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of independent trials (default 200)
    #[arg(long)]
    pub trials: Option<usize>,
    /// Seed of the random streams (default 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// `uniform`, `alternating`, or `bits:0110...`.
    #[arg(long)]
    pub input: Option<String>,
    /// Include the per-trial reports.
    #[arg(long)]
    pub verbose: bool,
}
