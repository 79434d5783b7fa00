//! Candidate output distributions for the duality bound.
//!
//! Each variant defines unnormalized weights `a(y) = q^y exp(b(y))`:
//!
//! - [`DualVariant::StickyZeroGap`]: `b(y) = g(y) - y h(p)` with
//!   `g(y) = log (y-1)! - Λ₁(y) - Λ₂(y)`, on `y ≥ 1`.
//! - [`DualVariant::DuplicationZeroGap`]: `b(y) = Λ₁ - Λ₂ - Λ₃ - y h(p)/(1+p)`,
//!   on `y ≥ 1`.
//! - [`DualVariant::GeomDelConvexity`]: `b(y) = log binom(y/p - 1, y) - y h(p)/p`,
//!   on `y ≥ 0`.
//! - [`DualVariant::GeomDelTruncated`]:
//!   `b(y) = Λ₂ - Λ₁ - log y! - y Li(1/(1+2p)) - y h(p)/p`, on `y ≥ 0`.
//! - [`DualVariant::InverseBinomial`]: `b(y) = log binom(y/p, y) - y h(p)/p`,
//!   on `y ≥ 0`.
//!
//! The deletion-family variants additionally accept a mass parameter
//! `δ ∈ (0, 1]` that replaces the weight at `y = 0` by `δ`. Their
//! normalizer is then `1/α = δ + Σ_{y≥1} a(y)`.

mod gap;
pub mod integrands;
mod table;

pub(crate) use gap::infimum as gap_infimum;
pub use gap::{
    analytic_gaps, conv_gap, delta_shift, epsilon_inf, kl_divergence, kl_gap_profile,
    limit_candidate, GapInfimum, KLGapProfile, DEFAULT_X_MAX,
};
pub use integrands::{
    g_duplication, g_sticky, i_p, lambda1_sticky, lambda2_sticky, lambda_trunc_geomdel,
    lambdas_duplication, r_p, truncation_point,
};
pub use table::{Moments, WeightTable};

use crate::channels::Family;
use crate::numerics::series::{DEFAULT_HARD_CAP, DEFAULT_REL_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DualVariant {
    StickyZeroGap,
    DuplicationZeroGap,
    GeomDelConvexity,
    GeomDelTruncated,
    InverseBinomial,
}

impl DualVariant {
    /// Whether the support contains `y = 0`.
    pub fn includes_zero(self) -> bool {
        !matches!(
            self,
            DualVariant::StickyZeroGap | DualVariant::DuplicationZeroGap
        )
    }

    /// The channel family the variant is built for.
    pub fn family(self) -> Family {
        match self {
            DualVariant::StickyZeroGap => Family::GeometricSticky,
            DualVariant::DuplicationZeroGap => Family::ElementaryDuplication,
            _ => Family::GeometricDeletion,
        }
    }
}

/// A normalized dual distribution at fixed `(p, q, δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualDistribution {
    q: f64,
    delta: f64,
    table: WeightTable,
    log_normalizer: f64,
    log_inv_y0: f64,
    mean: f64,
    y_max: u64,
    tail_bound: f64,
}

/// Builds the dual for `variant` at `(p, q, δ)`.
///
/// `delta` must be `1` for the sticky and duplication variants.
pub fn build_dual(variant: DualVariant, p: f64, q: f64, delta: f64) -> Result<DualDistribution> {
    let mut table = WeightTable::new(variant, p)?;
    DualDistribution::from_table(&mut table, q, delta)
}

impl DualDistribution {
    /// Builds the dual from a shared weight table, extending it as needed.
    pub fn from_table(table: &mut WeightTable, q: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::domain("delta", delta, "(0, 1]"));
        }
        if delta != 1.0 && !table.variant().includes_zero() {
            return Err(Error::Unsupported(
                "the mass at y = 0 can only be modified for deletion-family duals",
            ));
        }
        let m = table.moments(q, DEFAULT_REL_TOL, DEFAULT_HARD_CAP)?;
        let (log_normalizer, log_inv_y0) = if table.variant().includes_zero() {
            let s = m.log_weight_sum;
            (
                crate::numerics::log_add_exp(libm::log(delta), s),
                crate::numerics::log_add_exp(0.0, s),
            )
        } else {
            (m.log_weight_sum, m.log_weight_sum)
        };
        let mean = libm::exp(m.log_first_moment - log_normalizer);
        let tail_bound = m.relative_tail * mean;
        let mut cached = table.clone();
        cached.extend_to(m.y_max)?;
        Ok(Self {
            q,
            delta,
            table: cached,
            log_normalizer,
            log_inv_y0,
            mean,
            y_max: m.y_max,
            tail_bound,
        })
    }

    /// Returns the same distribution with log-weights cached through `y`.
    pub fn with_cache_to(mut self, y: u64) -> Result<Self> {
        self.table.extend_to(y)?;
        Ok(self)
    }

    pub fn variant(&self) -> DualVariant {
        self.table.variant()
    }

    pub fn p(&self) -> f64 {
        self.table.p()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `log(1/α)` for deletion-family duals, `log(1/y₀)` otherwise.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    /// `log(1/y₀)` of the unmodified (`δ = 1`) distribution.
    pub fn log_inv_y0(&self) -> f64 {
        self.log_inv_y0
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `(Y_max, tail_bound)`: the normalizer and mean sums stop at `Y_max`
    /// and the probability mass beyond it is at most `tail_bound`.
    pub fn truncation(&self) -> (u64, f64) {
        (self.y_max, self.tail_bound)
    }

    /// Unnormalized log-weight `log a(y)`, with `a(0) = δ` when the
    /// support includes zero.
    pub fn log_weight(&self, y: u64) -> Result<f64> {
        if y == 0 {
            return Ok(if self.variant().includes_zero() {
                libm::log(self.delta)
            } else {
                f64::NEG_INFINITY
            });
        }
        Ok(self.table.evaluate(y)? + y as f64 * libm::log(self.q))
    }

    pub fn log_pmf(&self, y: u64) -> Result<f64> {
        Ok(self.log_weight(y)? - self.log_normalizer)
    }

    pub fn pmf(&self, y: u64) -> Result<f64> {
        Ok(libm::exp(self.log_pmf(y)?))
    }

    /// The intercept `b` of the affine line `a E[Y_x] + b` that the gap is
    /// measured against: `log(1/α) - d log δ` for deletion-family duals and
    /// `log(1/y₀)` otherwise. The slope is `-log q`.
    pub fn line_intercept(&self) -> f64 {
        if self.variant().includes_zero() {
            self.log_normalizer - (1.0 - self.p()) * libm::log(self.delta)
        } else {
            self.log_normalizer
        }
    }

    pub fn line_slope(&self) -> f64 {
        -libm::log(self.q)
    }
}
