//! Optional TOML configuration mirroring the command-line flags.
//!
//! ```toml
//! nats = false
//! threads = 4
//!
//! [sweep]
//! family = "sticky"
//! p_values = [0.05, 0.1, 0.2]
//! ```
//!
//! Values given on the command line replace those from the file.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::cli::{BoundArgs, Cli, Command, KlgapArgs, SimulateArgs, SweepArgs, VerifyArgs};
use crate::AppError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub no_meta: Option<bool>,
    pub nats: Option<bool>,
    pub threads: Option<usize>,
    pub bound: BoundArgs,
    pub sweep: SweepArgs,
    pub verify: VerifyArgs,
    pub klgap: KlgapArgs,
    pub simulate: SimulateArgs,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, AppError> {
        toml::from_str(text).map_err(|e| AppError::Usage(format!("config file: {e}")))
    }
}

impl BoundArgs {
    fn or(self, f: BoundArgs) -> Self {
        Self {
            family: self.family.or(f.family),
            p: self.p.or(f.p),
            variant: self.variant.or(f.variant),
            format: self.format.or(f.format),
        }
    }
}

impl SweepArgs {
    fn or(self, f: SweepArgs) -> Self {
        Self {
            family: self.family.or(f.family),
            variant: self.variant.or(f.variant),
            p_start: self.p_start.or(f.p_start),
            p_end: self.p_end.or(f.p_end),
            steps: self.steps.or(f.steps),
            p_values: self.p_values.or(f.p_values),
            out: self.out.or(f.out),
            emit_inner: self.emit_inner.or(f.emit_inner),
            inner_points: self.inner_points.or(f.inner_points),
        }
    }
}

impl VerifyArgs {
    fn or(self, f: VerifyArgs) -> Self {
        Self {
            only: self.only.or(f.only),
            tolerance: self.tolerance.or(f.tolerance),
            perturb: if self.perturb.is_empty() {
                f.perturb
            } else {
                self.perturb
            },
            json: self.json || f.json,
        }
    }
}

impl KlgapArgs {
    fn or(self, f: KlgapArgs) -> Self {
        Self {
            family: self.family.or(f.family),
            p: self.p.or(f.p),
            q: self.q.or(f.q),
            variant: self.variant.or(f.variant),
            delta_rule: self.delta_rule.or(f.delta_rule),
            x_max: self.x_max.or(f.x_max),
        }
    }
}

impl SimulateArgs {
    fn or(self, f: SimulateArgs) -> Self {
        Self {
            n: self.n.or(f.n),
            lambda: self.lambda.or(f.lambda),
            eps: self.eps.or(f.eps),
            trials: self.trials.or(f.trials),
            seed: self.seed.or(f.seed),
            input: self.input.or(f.input),
            verbose: self.verbose || f.verbose,
        }
    }
}

/// Fills every option not given on the command line from `file`.
pub fn merge(cli: Cli, file: FileConfig) -> Cli {
    let command = match cli.command {
        Command::Bound(a) => Command::Bound(a.or(file.bound)),
        Command::Sweep(a) => Command::Sweep(a.or(file.sweep)),
        Command::Verify(a) => Command::Verify(a.or(file.verify)),
        Command::Klgap(a) => Command::Klgap(a.or(file.klgap)),
        Command::Simulate(a) => Command::Simulate(a.or(file.simulate)),
    };
    Cli {
        config: cli.config,
        no_meta: cli.no_meta || file.no_meta.unwrap_or(false),
        nats: cli.nats || file.nats.unwrap_or(false),
        threads: cli.threads.or(file.threads),
        command,
    }
}
