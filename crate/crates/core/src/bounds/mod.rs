//! Capacity upper bounds obtained by optimizing the duality bound over the
//! dual family parameter `q`.
//!
//! For a dual with normalizer `N_q` and mean `μ_q`, the mean-limited
//! channel satisfies `Cap'_μ ≤ b - ε - μ log q` where `b` is the line
//! intercept and `ε` the gap infimum. Combining this with the reduction from
//! repeat channels to integer channels gives, with `d = 1 - p`:
//!
//! | variant                    | objective                                   | constraint  |
//! |----------------------------|---------------------------------------------|-------------|
//! | sticky                     | `(log N - μ log q) / (d μ)`                 | `μ ≥ 1/d`   |
//! | duplication                | `(1+p)(log N - μ log q) / μ`                | `μ ≥ 1+p`   |
//! | deletion (all δ rules)     | `p(-ε - d log δ + log N - μ log q) / (d(1+μ))` | `μ ≥ p/d` |
//!
//! Values of `q` violating the constraint score `0`.

mod objective;
pub mod tables;

pub use objective::{bound_objective, ObjectiveValue};
pub use tables::{
    parse_table_id, reference_table, run_job, table_checksum, table_jobs, verify_entry,
    verify_tables, Computed, RefValue, ReferenceRow, ReferenceTable, TableId, TableJob,
    VerifyEntry, VerifyReport, VerifyTolerances,
};

use alloc::vec::Vec;

use crate::dual::{analytic_gaps, delta_shift, DualVariant, WeightTable, DEFAULT_X_MAX};
use crate::dual::{limit_candidate, GapInfimum};
use crate::numerics::optimize::maximize_scanning;
use crate::{Error, Result, LN_2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundVariant {
    StickyExact,
    DuplicationExact,
    GeomDelConv,
    GeomDelTrunc,
    GeomDelDeltaD,
    GeomDelElementary,
}

impl BoundVariant {
    pub const ALL: [BoundVariant; 6] = [
        BoundVariant::StickyExact,
        BoundVariant::DuplicationExact,
        BoundVariant::GeomDelConv,
        BoundVariant::GeomDelTrunc,
        BoundVariant::GeomDelDeltaD,
        BoundVariant::GeomDelElementary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundVariant::StickyExact => "sticky",
            BoundVariant::DuplicationExact => "duplication",
            BoundVariant::GeomDelConv => "conv",
            BoundVariant::GeomDelTrunc => "trunc",
            BoundVariant::GeomDelDeltaD => "delta-d",
            BoundVariant::GeomDelElementary => "elementary",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    /// The dual family behind the variant, if it uses one.
    pub fn dual_variant(self) -> Option<DualVariant> {
        match self {
            BoundVariant::StickyExact => Some(DualVariant::StickyZeroGap),
            BoundVariant::DuplicationExact => Some(DualVariant::DuplicationZeroGap),
            BoundVariant::GeomDelConv | BoundVariant::GeomDelDeltaD => {
                Some(DualVariant::GeomDelConvexity)
            }
            BoundVariant::GeomDelTrunc => Some(DualVariant::GeomDelTruncated),
            BoundVariant::GeomDelElementary => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub p: f64,
    pub variant: BoundVariant,
    pub bound_nats: f64,
    pub bound_bits: f64,
    pub q_opt: f64,
    /// Mean of the dual at `q_opt`; `NaN` for the closed-form bound.
    pub mu_opt: f64,
    pub epsilon_used: f64,
    /// Input at which the gap infimum was attained, `None` for the limit.
    pub epsilon_at: Option<u64>,
    /// Mass at `y = 0` (1 for the sticky and duplication duals).
    pub delta: f64,
    /// Whether `μ_{q_opt}` meets the mean constraint.
    pub feasible: bool,
    /// Set when the raw bound exceeds one bit; the raw value is kept.
    pub clamped_to_one: bool,
    /// False when the scan over `q` was not unimodal.
    pub unimodal: bool,
}

impl BoundResult {
    fn new(p: f64, variant: BoundVariant, nats: f64) -> Self {
        let bits = nats / LN_2;
        Self {
            p,
            variant,
            bound_nats: nats,
            bound_bits: bits,
            q_opt: f64::NAN,
            mu_opt: f64::NAN,
            epsilon_used: 0.0,
            epsilon_at: None,
            delta: 1.0,
            feasible: true,
            clamped_to_one: bits > 1.0,
            unimodal: true,
        }
    }
}

/// Tuning knobs for the optimization over `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSettings {
    /// Lower end of the `q` bracket.
    pub q_min: f64,
    /// Upper end of the `q` bracket.
    pub q_max: f64,
    /// Largest number of series terms one evaluation may need (estimated as
    /// `30 / -log q`). Tighter than `q_max` when both apply.
    pub term_budget: f64,
    /// Width at which the golden-section refinement stops, in `q`.
    pub q_tol: f64,
    /// Inputs scanned for the gap infimum.
    pub x_max: u64,
    /// Number of consecutive decreases after which the grid scan over `q`
    /// stops early; `None` scans the full grid.
    pub scan_patience: Option<usize>,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self {
            q_min: 1e-6,
            q_max: 1.0 - 1e-6,
            term_budget: 1.0e5,
            q_tol: 1e-7,
            x_max: DEFAULT_X_MAX,
            scan_patience: Some(4),
        }
    }
}

impl BoundSettings {
    /// The effective upper end of the bracket after the term budget.
    pub fn effective_q_max(&self) -> f64 {
        self.q_max.min(libm::exp(-30.0 / self.term_budget))
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("p", p, "(0, 1)"))
    }
}

/// Gap data for the deletion variants: the mass `δ` and `ε_δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaChoice {
    pub delta: f64,
    pub epsilon: GapInfimum,
}

/// Applies the δ rule of a deletion variant to its q-independent base gaps.
pub fn delta_choice(variant: BoundVariant, p: f64, x_max: u64) -> Result<DeltaChoice> {
    check_p(p)?;
    let dual = variant
        .dual_variant()
        .filter(|v| v.includes_zero())
        .ok_or(Error::Unsupported(
            "δ rules apply to the deletion variants only",
        ))?;
    let d = 1.0 - p;
    let base = analytic_gaps(dual, p, x_max)?;
    let delta = match variant {
        BoundVariant::GeomDelConv => libm::exp(-(base[0] - 0.5) / d).min(1.0),
        BoundVariant::GeomDelTrunc => libm::exp(-base[0] / d),
        _ => d,
    };
    let shifted: Vec<f64> = base
        .iter()
        .enumerate()
        .map(|(i, g)| g + delta_shift(i as u64 + 1, p, delta))
        .collect();
    let epsilon = crate::dual::gap_infimum(&shifted, limit_candidate(dual, p, delta));
    Ok(DeltaChoice { delta, epsilon })
}

/// Maximizes the bound objective of `variant` over `q`.
pub fn optimize_bound(
    variant: BoundVariant,
    p: f64,
    settings: &BoundSettings,
) -> Result<BoundResult> {
    check_p(p)?;
    let dual = match variant.dual_variant() {
        Some(d) => d,
        None => return geomdel_elementary_bound(p),
    };
    let choice = if dual.includes_zero() {
        Some(delta_choice(variant, p, settings.x_max)?)
    } else {
        None
    };
    let (delta, epsilon) = choice.map(|c| (c.delta, c.epsilon)).unwrap_or((
        1.0,
        GapInfimum {
            value: 0.0,
            at_x: Some(1),
        },
    ));
    let mut table = WeightTable::new(dual, p)?;

    // Search in s = -log(1 - q), which spreads the grid over the region near
    // q = 1 where the mean constraint starts to hold for large p.
    let s_lo = -libm::log1p(-settings.q_min);
    let s_hi = -libm::log1p(-settings.effective_q_max());
    let mut failure: Option<Error> = None;
    let mut f = |s: f64| {
        let q = -libm::expm1(-s);
        match bound_objective(variant, &mut table, q, delta, epsilon.value) {
            Ok(v) => v.value,
            Err(e) => {
                failure.get_or_insert(e.at_q(q));
                f64::NAN
            }
        }
    };
    // A step of ds moves q by (1 - q) ds, so a tolerance in s is at least as
    // tight in q.
    let m = maximize_scanning(&mut f, s_lo, s_hi, settings.q_tol, settings.scan_patience);
    if let Some(e) = failure {
        return Err(e);
    }
    let q_opt = -libm::expm1(-m.arg);
    let at_opt = bound_objective(variant, &mut table, q_opt, delta, epsilon.value)
        .map_err(|e| e.at_q(q_opt))?;
    let mut r = BoundResult::new(p, variant, at_opt.value);
    r.q_opt = q_opt;
    r.mu_opt = at_opt.mu;
    r.epsilon_used = epsilon.value;
    r.epsilon_at = epsilon.at_x;
    r.delta = delta;
    r.feasible = at_opt.feasible;
    r.unimodal = m.unimodal;
    Ok(r)
}

/// The geometric sticky channel bound.
pub fn sticky_bound(p: f64) -> Result<BoundResult> {
    optimize_bound(BoundVariant::StickyExact, p, &BoundSettings::default())
}

/// The elementary duplication channel bound. Raw values above one bit are
/// kept and flagged.
pub fn duplication_bound(p: f64) -> Result<BoundResult> {
    optimize_bound(BoundVariant::DuplicationExact, p, &BoundSettings::default())
}

/// The geometric deletion channel bound for one of the δ rules.
pub fn geomdel_bound(p: f64, variant: BoundVariant) -> Result<BoundResult> {
    match variant {
        BoundVariant::GeomDelConv | BoundVariant::GeomDelTrunc | BoundVariant::GeomDelDeltaD => {
            optimize_bound(variant, p, &BoundSettings::default())
        }
        BoundVariant::GeomDelElementary => geomdel_elementary_bound(p),
        _ => Err(Error::Unsupported("not a geometric deletion variant")),
    }
}

/// All three optimized deletion bounds and the smallest of them.
#[derive(Debug, Clone, PartialEq)]
pub struct GeomDelComparison {
    pub conv: BoundResult,
    pub trunc: BoundResult,
    pub delta_d: BoundResult,
}

impl GeomDelComparison {
    pub fn best(&self) -> &BoundResult {
        [&self.conv, &self.trunc, &self.delta_d]
            .into_iter()
            .fold(
                &self.conv,
                |a, b| if b.bound_nats < a.bound_nats { b } else { a },
            )
    }

    /// `min(conv, trunc)`, the main column of the reference table.
    pub fn best_default(&self) -> &BoundResult {
        if self.trunc.bound_nats < self.conv.bound_nats {
            &self.trunc
        } else {
            &self.conv
        }
    }
}

pub fn geomdel_comparison(p: f64, settings: &BoundSettings) -> Result<GeomDelComparison> {
    Ok(GeomDelComparison {
        conv: optimize_bound(BoundVariant::GeomDelConv, p, settings)?,
        trunc: optimize_bound(BoundVariant::GeomDelTrunc, p, settings)?,
        delta_d: optimize_bound(BoundVariant::GeomDelDeltaD, p, settings)?,
    })
}

/// The closed-form bound `-d log d - log(1 - d/2)/d` nats for `d < 1/2`,
/// obtained from the inverse binomial dual at `q = 1 - d/2`.
pub fn geomdel_elementary_bound(p: f64) -> Result<BoundResult> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::domain("p", p, "(1/2, 1)"));
    }
    let d = 1.0 - p;
    let nats = -d * libm::log(d) - libm::log1p(-d / 2.0) / d;
    let mut r = BoundResult::new(p, BoundVariant::GeomDelElementary, nats);
    r.q_opt = 1.0 - d / 2.0;
    r.delta = d;
    Ok(r)
}

/// Evaluates each `p` independently; failures stay in place.
pub fn sweep(variant: BoundVariant, p_values: &[f64]) -> Vec<Result<BoundResult>> {
    let settings = BoundSettings::default();
    p_values
        .iter()
        .map(|&p| optimize_bound(variant, p, &settings))
        .collect()
}
