//! Memoized q-independent parts of the dual log-weights.
//!
//! Every dual weight has the form `a(y) = q^y exp(b(y))` where `b` depends
//! on `p` only. Evaluating `b` costs one to three adaptive quadratures for
//! the Λ-based variants, while every normalizer, mean and divergence needs
//! `b` on a long run of consecutive integers, for many values of `q`. The
//! table computes `b(y)` once per `y` and keeps it.

use alloc::vec::Vec;

use super::integrands::{g_duplication, g_sticky, lambda_trunc_geomdel};
use super::DualVariant;
use crate::numerics::series::{sum_series, SeriesSpec};
use crate::numerics::special::{binary_entropy, ln_gamma, log_integral_li};
use crate::{Error, Result};

/// The table of `b(y)` for one `(variant, p)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    variant: DualVariant,
    p: f64,
    /// Entropy tilt per output symbol.
    tilt: f64,
    /// `Li(1/(1+2p))`, used by the truncated variant only.
    li: f64,
    base: Vec<f64>,
}

/// Sums over the weights `a(y)`, `y ≥ 1`, at a fixed `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// `log Σ_{y≥1} a(y)`.
    pub log_weight_sum: f64,
    /// `log Σ_{y≥1} y a(y)`.
    pub log_first_moment: f64,
    /// Last `y` included in the sums.
    pub y_max: u64,
    /// Bound on the discarded part of `Σ y a(y)`, relative to it. The
    /// discarded part of `Σ a(y)` is no larger in absolute terms.
    pub relative_tail: f64,
}

impl WeightTable {
    pub fn new(variant: DualVariant, p: f64) -> Result<Self> {
        let h = binary_entropy(p, false)?;
        let tilt = match variant {
            DualVariant::StickyZeroGap => h,
            DualVariant::DuplicationZeroGap => h / (1.0 + p),
            _ => h / p,
        };
        let li = match variant {
            DualVariant::GeomDelTruncated => log_integral_li(1.0 / (1.0 + 2.0 * p))?,
            _ => 0.0,
        };
        let zero = if variant.includes_zero() {
            0.0
        } else {
            f64::NEG_INFINITY
        };
        Ok(Self {
            variant,
            p,
            tilt,
            li,
            base: alloc::vec![zero],
        })
    }

    pub fn variant(&self) -> DualVariant {
        self.variant
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Number of cached entries (`y = 0 .. len - 1`).
    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `b(y)` without touching the cache.
    pub fn evaluate(&self, y: u64) -> Result<f64> {
        if let Some(&v) = self.base.get(y as usize) {
            return Ok(v);
        }
        let p = self.p;
        let yf = y as f64;
        let core = match self.variant {
            DualVariant::StickyZeroGap => g_sticky(y, p)?,
            DualVariant::DuplicationZeroGap => g_duplication(y, p)?,
            DualVariant::GeomDelConvexity => log_binom_conv(yf, p),
            DualVariant::GeomDelTruncated => {
                let (l1, l2) = lambda_trunc_geomdel(y, p)?;
                l2 - l1 - ln_gamma(yf + 1.0) - yf * self.li
            }
            DualVariant::InverseBinomial => log_binom_invbin(yf, p),
        };
        Ok(core - yf * self.tilt)
    }

    /// `b(y)`, memoized.
    pub fn get(&mut self, y: u64) -> Result<f64> {
        self.extend_to(y)?;
        Ok(self.base[y as usize])
    }

    /// Fills the cache through `y_max`.
    pub fn extend_to(&mut self, y_max: u64) -> Result<()> {
        while (self.base.len() as u64) <= y_max {
            let y = self.base.len() as u64;
            let v = self.evaluate(y)?;
            self.base.push(v);
        }
        Ok(())
    }

    /// Read-only view of the cached values.
    pub fn cached(&self) -> &[f64] {
        &self.base
    }

    /// `Σ a(y)` and `Σ y a(y)` over `y ≥ 1`, extending the cache as far as
    /// the series needs.
    pub fn moments(&mut self, q: f64, rel_tol: f64, hard_cap: usize) -> Result<Moments> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain("q", q, "(0, 1)"));
        }
        let log_q = libm::log(q);
        let mut failure = None;
        let mut spec = SeriesSpec::new(
            |y: u64| match self.get(y) {
                Ok(b) => libm::log(y as f64) + b + y as f64 * log_q,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            1,
            // The terms behave like q^y sqrt(y): their ratios decrease
            // toward q, so the latest ratio bounds all later ones.
            |y: u64, observed: f64| {
                if y < 2 || observed.is_nan() {
                    1.0
                } else {
                    observed.max(q)
                }
            },
        )
        .with_rel_tol(rel_tol)
        .with_hard_cap(hard_cap);
        let series = sum_series(&mut spec);
        if let Some(e) = failure {
            return Err(e);
        }
        let series = series?;
        let y_max = series.last_index;
        let mut log_weight_sum = f64::NEG_INFINITY;
        for y in 1..=y_max {
            log_weight_sum = crate::numerics::log_add_exp(
                log_weight_sum,
                self.base[y as usize] + y as f64 * log_q,
            );
        }
        Ok(Moments {
            log_weight_sum,
            log_first_moment: series.log_sum,
            y_max,
            relative_tail: series.relative_tail(),
        })
    }
}

/// `log binom(y/p - 1, y) = log Γ(y/p) - log Γ(y+1) - log Γ(y(1-p)/p)`,
/// with value `0` at `y = 0`.
pub(crate) fn log_binom_conv(y: f64, p: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    ln_gamma(y / p) - ln_gamma(y + 1.0) - ln_gamma(y * (1.0 - p) / p)
}

/// `log binom(y/p, y)`.
pub(crate) fn log_binom_invbin(y: f64, p: f64) -> f64 {
    ln_gamma(y / p + 1.0) - ln_gamma(y + 1.0) - ln_gamma(y * (1.0 - p) / p + 1.0)
}
