//! Globally adaptive Gauss–Kronrod (10/21) quadrature.
//!
//! The 21-point Kronrod rule is open, so the integrand is never evaluated at
//! an interval endpoint. All integrands in this crate have removable
//! singularities at `t = 0` and/or `t = 1`; when a subinterval shrinks until
//! an abscissa rounds onto an endpoint, or the integrand turns non-finite
//! right next to one, the caller-supplied endpoint limit is used instead.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_REL_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_SUBINTERVALS: usize = 4000;

/// A definite integral over `[lo, hi]` together with its accuracy contract.
#[derive(Debug, Clone)]
pub struct QuadratureProblem<F> {
    pub integrand: F,
    pub lo: f64,
    pub hi: f64,
    /// Analytic values of the integrand at `lo` and `hi`, if known.
    pub endpoint_limits: (Option<f64>, Option<f64>),
    pub abs_tol: f64,
    /// Relative tolerance. Integrals of size `|I|` cannot be resolved below
    /// roughly `1e-15 |I|` in double precision, so an absolute tolerance alone
    /// is unattainable for large values.
    pub rel_tol: f64,
    pub max_subintervals: usize,
}

impl<F: Fn(f64) -> f64> QuadratureProblem<F> {
    pub fn new(integrand: F, lo: f64, hi: f64) -> Self {
        Self {
            integrand,
            lo,
            hi,
            endpoint_limits: (None, None),
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: DEFAULT_REL_TOL,
            max_subintervals: DEFAULT_MAX_SUBINTERVALS,
        }
    }

    pub fn with_limits(mut self, at_lo: Option<f64>, at_hi: Option<f64>) -> Self {
        self.endpoint_limits = (at_lo, at_hi);
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn eval(&self, t: f64) -> f64 {
        let (at_lo, at_hi) = self.endpoint_limits;
        if t <= self.lo {
            if let Some(v) = at_lo {
                return v;
            }
        }
        if t >= self.hi {
            if let Some(v) = at_hi {
                return v;
            }
        }
        let v = (self.integrand)(t);
        if v.is_finite() {
            return v;
        }
        let scale = self.hi - self.lo;
        match (at_lo, at_hi) {
            (Some(l), _) if t - self.lo <= 1e-9 * scale => l,
            (_, Some(h)) if self.hi - t <= 1e-9 * scale => h,
            _ => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub err_estimate: f64,
    pub subintervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(problem: &QuadratureProblem<F>, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = problem.eval(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = fc.abs() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = problem.eval(center - dx);
        let f2 = problem.eval(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let raw_err = ((kronrod - gauss) * half).abs();
    let roundoff = 50.0 * f64::EPSILON * abs_sum * half.abs();
    Segment {
        lo,
        hi,
        value,
        err: raw_err.max(roundoff),
        abs_value: abs_sum * half.abs(),
    }
}

/// Integrates `problem.integrand` over `[lo, hi]`.
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |value|)`, or below the
/// roundoff level `100 eps ∫|f|` when that is larger. Fails with
/// [`Error::Quadrature`] when the subdivision budget runs out or intervals can
/// no longer be split.
pub fn integrate<F: Fn(f64) -> f64>(problem: &QuadratureProblem<F>) -> Result<Integral> {
    let (lo, hi) = (problem.lo, problem.hi);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain("interval length", hi - lo, "(0, inf)"));
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod21(problem, lo, hi);
    let (mut value, mut err, mut abs_value) = (first.value, first.err, first.abs_value);
    heap.push(first);
    let mut evaluations = 21;

    let tolerance = |value: f64, abs_value: f64| {
        problem
            .abs_tol
            .max(problem.rel_tol * value.abs())
            .max(100.0 * f64::EPSILON * abs_value)
    };

    while err > tolerance(value, abs_value) {
        if heap.len() >= problem.max_subintervals || !err.is_finite() {
            return Err(Error::Quadrature {
                achieved: err,
                requested: tolerance(value, abs_value),
                subintervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            return Err(Error::Quadrature {
                achieved: err,
                requested: tolerance(value, abs_value),
                subintervals: heap.len() + 1,
            });
        }
        let left = kronrod21(problem, worst.lo, mid);
        let right = kronrod21(problem, mid, worst.hi);
        evaluations += 42;
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift accumulated by the incremental updates.
    let (value, err) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.err));
    if !value.is_finite() || !err.is_finite() {
        return Err(Error::Quadrature {
            achieved: f64::INFINITY,
            requested: problem.abs_tol,
            subintervals: heap.len(),
        });
    }
    Ok(Integral {
        value,
        err_estimate: err,
        subintervals: heap.len(),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear() {
        let r = integrate(&QuadratureProblem::new(|_| 1.0, 0.0, 1.0)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let r = integrate(&QuadratureProblem::new(|t| t, 0.0, 1.0)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polynomials_up_to_degree_five_within_estimate() {
        let coeffs = [0.3, -1.2, 2.5, 0.7, -3.1, 1.9];
        let f = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        let exact: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c / (k as f64 + 1.0))
            .sum();
        let r = integrate(&QuadratureProblem::new(f, 0.0, 1.0)).unwrap();
        assert!((r.value - exact).abs() <= r.err_estimate.max(1e-15));
    }

    #[test]
    fn endpoint_limits_replace_singular_evaluations() {
        // sin(t)/t style removable singularity at 0 encoded as 0/0.
        let f = |t: f64| if t == 0.0 { f64::NAN } else { libm::sin(t) / t };
        let p = QuadratureProblem::new(f, 0.0, 1.0).with_limits(Some(1.0), None);
        let r = integrate(&p).unwrap();
        assert!((r.value - 0.946_083_070_367_183_1).abs() < 1e-12);
    }

    #[test]
    fn log_endpoint_singularity() {
        // ∫_0^1 -log t dt = 1
        let r = integrate(&QuadratureProblem::new(|t| -libm::log(t), 0.0, 1.0)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut p = QuadratureProblem::new(|t: f64| 1.0 / t.sqrt().sqrt().powi(3), 0.0, 1.0);
        p.max_subintervals = 3;
        p.abs_tol = 1e-14;
        p.rel_tol = 0.0;
        assert!(matches!(integrate(&p), Err(Error::Quadrature { .. })));
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(integrate(&QuadratureProblem::new(|t| t, 1.0, 1.0)).is_err());
    }
}
