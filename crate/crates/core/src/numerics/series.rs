//! Log-space summation of nonnegative series with a geometric tail bound.

use super::log_add_exp;
use crate::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-12;
pub const DEFAULT_HARD_CAP: usize = 2_000_000;

/// A nonnegative series `Σ_{y ≥ start} term(y)` described by its log-terms.
///
/// `ratio_bound(y, observed)` must return an upper bound on
/// `term(y + 1) / term(y)` that also holds for every later ratio. It receives
/// the most recent observed ratio `term(y) / term(y - 1)` (or `NaN` for the
/// first term). Summation stops once the geometric tail estimate
/// `term(y) r / (1 - r)` falls below `rel_tol` times the partial sum.
pub struct SeriesSpec<L, R> {
    pub log_term: L,
    pub start_index: u64,
    pub rel_tol: f64,
    pub ratio_bound: R,
    pub hard_cap: usize,
}

impl<L, R> SeriesSpec<L, R>
where
    L: FnMut(u64) -> f64,
    R: FnMut(u64, f64) -> f64,
{
    pub fn new(log_term: L, start_index: u64, ratio_bound: R) -> Self {
        Self {
            log_term,
            start_index,
            rel_tol: DEFAULT_REL_TOL,
            ratio_bound,
            hard_cap: DEFAULT_HARD_CAP,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_hard_cap(mut self, hard_cap: usize) -> Self {
        self.hard_cap = hard_cap;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    /// Log of the partial sum.
    pub log_sum: f64,
    pub terms_used: usize,
    /// Upper bound on the discarded tail, in linear scale.
    pub tail_bound: f64,
    /// Last index included in the partial sum.
    pub last_index: u64,
}

impl SeriesSum {
    /// Upper bound on the relative effect of the discarded tail.
    pub fn relative_tail(&self) -> f64 {
        self.tail_bound * libm::exp(-self.log_sum)
    }
}

/// Sums the series in log-space, stopping on the geometric tail criterion.
///
/// Returns [`Error::SeriesCap`] with the unresolved tail bound when
/// `hard_cap` terms were not enough.
pub fn sum_series<L, R>(spec: &mut SeriesSpec<L, R>) -> Result<SeriesSum>
where
    L: FnMut(u64) -> f64,
    R: FnMut(u64, f64) -> f64,
{
    let mut log_sum = f64::NEG_INFINITY;
    let mut previous = f64::NAN;
    let mut log_tail = f64::INFINITY;
    for (used, y) in (1..=spec.hard_cap).zip(spec.start_index..) {
        let log_term = (spec.log_term)(y);
        if log_term.is_nan() || log_term == f64::INFINITY {
            return Err(Error::domain("log_term", log_term, "[-inf, inf)"));
        }
        log_sum = log_add_exp(log_sum, log_term);
        let observed = libm::exp(log_term - previous);
        let r = (spec.ratio_bound)(y, observed);
        log_tail = if log_term == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else if r < 1.0 {
            log_term + libm::log(r) - libm::log1p(-r)
        } else {
            f64::INFINITY
        };
        if log_tail <= libm::log(spec.rel_tol) + log_sum || log_tail == f64::NEG_INFINITY {
            return Ok(SeriesSum {
                log_sum,
                terms_used: used,
                tail_bound: libm::exp(log_tail),
                last_index: y,
            });
        }
        previous = log_term;
    }
    Err(Error::SeriesCap {
        terms: spec.hard_cap,
        tail_bound: libm::exp(log_tail),
    })
}
