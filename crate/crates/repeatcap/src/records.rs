//! Flat output records and their CSV and JSON encodings.
//!
//! CSV files carry bits values with six decimals and every other number at
//! full precision; JSON carries everything at full precision.

use std::io::{Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use repeatcap_core::bounds::{BoundResult, BoundSettings};
use repeatcap_core::sim::TrialReport;
use serde::{Deserialize, Serialize};

use crate::AppError;

pub const BOUND_CSV_HEADER: [&str; 10] = [
    "p",
    "variant",
    "bound_bits",
    "bound_nats",
    "q_opt",
    "mu_opt",
    "epsilon_used",
    "feasible",
    "clamped",
    "error",
];

/// One bound evaluation, or the failure that replaced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub p: f64,
    pub variant: String,
    pub bound_bits: Option<f64>,
    pub bound_nats: Option<f64>,
    pub q_opt: Option<f64>,
    pub mu_opt: Option<f64>,
    pub epsilon_used: Option<f64>,
    pub feasible: Option<bool>,
    pub clamped: Option<bool>,
    pub error: Option<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl BoundRecord {
    pub fn from_result(r: &BoundResult) -> Self {
        Self {
            p: r.p,
            variant: r.variant.name().to_string(),
            bound_bits: Some(r.bound_bits),
            bound_nats: Some(r.bound_nats),
            q_opt: finite(r.q_opt),
            mu_opt: finite(r.mu_opt),
            epsilon_used: Some(r.epsilon_used),
            feasible: Some(r.feasible),
            clamped: Some(r.clamped_to_one),
            error: None,
        }
    }

    pub fn failure(p: f64, variant: &str, message: String) -> Self {
        Self {
            p,
            variant: variant.to_string(),
            bound_bits: None,
            bound_nats: None,
            q_opt: None,
            mu_opt: None,
            epsilon_used: None,
            feasible: None,
            clamped: None,
            error: Some(message),
        }
    }

    /// The record as it reads back from CSV, where bits carry six decimals.
    pub fn csv_rounded(&self) -> Self {
        let mut r = self.clone();
        r.bound_bits = r
            .bound_bits
            .map(|b| format!("{b:.6}").parse().expect("formatted float"));
        r
    }

    fn csv_fields(&self) -> [String; 10] {
        let num = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let flag = |x: Option<bool>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            self.p.to_string(),
            self.variant.clone(),
            self.bound_bits
                .map(|b| format!("{b:.6}"))
                .unwrap_or_default(),
            num(self.bound_nats),
            num(self.q_opt),
            num(self.mu_opt),
            num(self.epsilon_used),
            flag(self.feasible),
            flag(self.clamped),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

pub fn write_bound_csv<W: Write>(out: W, records: &[BoundRecord]) -> Result<(), AppError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(BOUND_CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bound_csv<R: Read>(input: R) -> Result<Vec<BoundRecord>, AppError> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Settings and provenance attached to JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub quadrature_abs_tol: f64,
    pub series_rel_tol: f64,
    pub optimizer_q_tol: f64,
    pub gap_x_max: u64,
}

impl Meta {
    pub fn now(settings: &BoundSettings) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            quadrature_abs_tol: repeatcap_core::numerics::quadrature::DEFAULT_ABS_TOL,
            series_rel_tol: repeatcap_core::numerics::series::DEFAULT_REL_TOL,
            optimizer_q_tol: settings.q_tol,
            gap_x_max: settings.x_max,
        }
    }
}

/// JSON form of one bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOutput {
    pub family: String,
    #[serde(flatten)]
    pub record: BoundRecord,
    pub delta: Option<f64>,
    /// Input attaining the gap infimum; absent when the limit did.
    pub epsilon_at: Option<u64>,
    pub unimodal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<Meta>,
}

impl BoundOutput {
    pub fn new(family: &str, r: &BoundResult, meta: Option<Meta>) -> Self {
        Self {
            family: family.to_string(),
            record: BoundRecord::from_result(r),
            delta: finite(r.delta),
            epsilon_at: r.epsilon_at,
            unimodal: Some(r.unimodal),
            meta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub edit_distance: usize,
    pub output_length: usize,
    pub success: bool,
}

impl TrialRecord {
    pub fn new(trial: u64, r: &TrialReport) -> Self {
        Self {
            trial,
            edit_distance: r.edit_distance,
            output_length: r.output_length,
            success: r.success,
        }
    }
}

/// JSON form of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutput {
    pub n: usize,
    pub lambda: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub input: String,
    pub success_rate: f64,
    pub mean_output_length: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reports: Option<Vec<TrialRecord>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<SimMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMeta {
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub rng: String,
}

impl SimMeta {
    pub fn now() -> Self {
        let base = Meta::now(&BoundSettings::default());
        Self {
            tool_version: base.tool_version,
            timestamp_unix: base.timestamp_unix,
            rng: "ChaCha8, key from seed, stream per trial".to_string(),
        }
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub entry: String,
    pub expected: String,
    pub computed_bits: Option<f64>,
    pub deviation: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub error: Option<String>,
}
