//! The Λ integrals behind the log-weights of the dual distributions, and the
//! remainder integral `R_p` of the truncated deletion construction.
//!
//! All integrands share the denominator `t log(1 - t)` and a numerator that
//! vanishes to second order at `t = 0`; see [`crate::numerics::kernel`].

use crate::numerics::kernel::{denominator, expm1_minus_x, x_minus_log1p, LogLinear};
use crate::numerics::quadrature::{integrate, QuadratureProblem, DEFAULT_ABS_TOL};
use crate::numerics::special::ln_gamma;
use crate::{Error, Result};

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("p", p, "(0, 1)"))
    }
}

fn check_y(y: f64, min: f64) -> Result<()> {
    if y >= min && y.is_finite() {
        Ok(())
    } else if min == 0.0 {
        Err(Error::domain("y", y, "[0, inf)"))
    } else {
        Err(Error::domain("y", y, "[1, inf)"))
    }
}

fn integrate_on<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    limits: (Option<f64>, Option<f64>),
) -> Result<f64> {
    let problem = QuadratureProblem::new(f, lo, hi)
        .with_limits(limits.0, limits.1)
        .with_abs_tol(DEFAULT_ABS_TOL);
    Ok(integrate(&problem)?.value)
}

/// Kernel of `f₁` for the sticky construction:
/// `1 + t - t y (1-p) - ((1-t)/(1-pt))^y / (1-t)`.
fn sticky_f1(y: f64, p: f64) -> LogLinear<2> {
    LogLinear::new([y - 1.0, -y], [-1.0, -p])
}

/// Kernel of `f₂` for the sticky construction: `1 - t y p - (1+pt)^{-y}`.
fn sticky_f2(y: f64, p: f64) -> LogLinear<1> {
    LogLinear::new([-y], [p])
}

/// `Λ₁(y) = ∫_0^1 f₁(y, t) dt` of the sticky construction.
pub fn lambda1_sticky(y: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    check_y(y, 1.0)?;
    let k = sticky_f1(y, p);
    integrate_on(
        |t| k.integrand(t),
        0.0,
        1.0,
        (Some(k.limit_at_zero()), Some(0.0)),
    )
}

/// `Λ₂(y) = ∫_0^1 f₂(y, t) dt` of the sticky construction.
pub fn lambda2_sticky(y: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    check_y(y, 1.0)?;
    let k = sticky_f2(y, p);
    integrate_on(
        |t| k.integrand(t),
        0.0,
        1.0,
        (Some(k.limit_at_zero()), Some(0.0)),
    )
}

/// `g(y) = log (y-1)! - Λ₁(y) - Λ₂(y)`.
pub fn g_sticky(y: u64, p: f64) -> Result<f64> {
    let yf = y as f64;
    Ok(ln_gamma(yf) - lambda1_sticky(yf, p)? - lambda2_sticky(yf, p)?)
}

/// Integrand of the duplication construction for the factor `k`.
///
/// The numerator is `1 - t y k/(1+p) - r^y` with
/// `r = (sqrt((1+p)^2 - 4pkt) - (1-p)) / (2p)`, the root of
/// `z (1 - p + p z) = 1 - kt` that makes `E[r^{Y_x}] = (1 - kt)^x`.
/// With `w = r - 1` both `w` and `tk/(1+p) + w` have closed forms free of
/// cancellation, and the numerator becomes
/// `-y ((tk/(1+p) + w) - ψ(w)) - φ(y log(1 + w))`.
fn duplication_integrand(y: f64, p: f64, k: f64, t: f64) -> f64 {
    let s = libm::sqrt((1.0 + p) * (1.0 + p) - 4.0 * p * k * t);
    let sum = s + 1.0 + p;
    let w = -2.0 * k * t / sum;
    let u = y * libm::log1p(w);
    let numerator = if w.abs() < 0.5 {
        let lead = -4.0 * p * k * k * t * t / ((1.0 + p) * sum * sum);
        -y * (lead - x_minus_log1p(w)) - expm1_minus_x(u)
    } else {
        1.0 - t * y * k / (1.0 + p) - libm::exp(u)
    };
    numerator / denominator(t)
}

/// Limit at `t = 0` of [`duplication_integrand`].
fn duplication_limit(y: f64, p: f64, k: f64) -> f64 {
    let s = 1.0 + p;
    k * k * (y * y - y) / (2.0 * s * s) - y * p * k * k / (s * s * s)
}

/// `(Λ₁, Λ₂, Λ₃)` of the duplication construction, for the factors
/// `k = 1, p, 1 - p` respectively.
pub fn lambdas_duplication(y: f64, p: f64) -> Result<[f64; 3]> {
    check_p(p)?;
    check_y(y, 1.0)?;
    let mut out = [0.0; 3];
    for (slot, k) in out.iter_mut().zip([1.0, p, 1.0 - p]) {
        *slot = integrate_on(
            |t| duplication_integrand(y, p, k, t),
            0.0,
            1.0,
            (Some(duplication_limit(y, p, k)), Some(0.0)),
        )?;
    }
    Ok(out)
}

/// `g(y) = Λ₁(y) - Λ₂(y) - Λ₃(y)` of the duplication construction.
pub fn g_duplication(y: u64, p: f64) -> Result<f64> {
    let [l1, l2, l3] = lambdas_duplication(y as f64, p)?;
    Ok(l1 - l2 - l3)
}

/// Upper integration limit `2p / (1 + 2p)` of the truncated construction.
pub fn truncation_point(p: f64) -> f64 {
    2.0 * p / (1.0 + 2.0 * p)
}

/// Integrand `(1 + c t - base(t)^y / (1 - t)) / (t log(1 - t))` with
/// `base(t) = (1 + b t) / (1 - t)`, where `b = -1/p` for `f₁` and
/// `b = -(1+p)/p` for `f₂`. The base turns negative past `t = -1/b` but stays
/// above `-1` up to the truncation point.
fn trunc_integrand(y: u64, b: f64, t: f64) -> f64 {
    let yf = y as f64;
    let kernel = LogLinear::new([yf, -(yf + 1.0)], [b, -1.0]);
    let lead = 1.0 + b * t;
    if y == 0 || lead >= 0.25 {
        return kernel.integrand(t);
    }
    let linear = 1.0 + kernel.slope() * t;
    let power = if lead == 0.0 {
        0.0
    } else {
        let magnitude = libm::exp(yf * libm::log(lead.abs()) - (yf + 1.0) * libm::log1p(-t));
        if lead < 0.0 && y % 2 == 1 {
            -magnitude
        } else {
            magnitude
        }
    };
    (linear - power) / denominator(t)
}

fn trunc_lambda(y: u64, p: f64, b: f64) -> Result<f64> {
    let hi = truncation_point(p);
    let yf = y as f64;
    let limit = LogLinear::new([yf, -(yf + 1.0)], [b, -1.0]).limit_at_zero();
    let f = |t| trunc_integrand(y, b, t);
    let kink = -1.0 / b;
    if y > 0 && kink < hi {
        Ok(integrate_on(f, 0.0, kink, (Some(limit), None))?
            + integrate_on(f, kink, hi, (None, None))?)
    } else {
        integrate_on(f, 0.0, hi, (Some(limit), None))
    }
}

/// `(Λ₁, Λ₂)` of the truncated deletion construction, integrated over
/// `[0, 2p/(1+2p)]`.
pub fn lambda_trunc_geomdel(y: u64, p: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    Ok((
        trunc_lambda(y, p, -1.0 / p)?,
        trunc_lambda(y, p, -(1.0 + p) / p)?,
    ))
}

/// `R_p(x) = -∫_{2p/(1+2p)}^1 (1-t)^{x-1} (1 - ((1-p)/(1-p(1-t)))^x) / (t log(1-t)) dt`,
/// the KL-gap of the undecorated truncated dual.
pub fn r_p(x: u64, p: f64) -> Result<f64> {
    check_p(p)?;
    if x == 0 {
        return Err(Error::domain("x", 0.0, "{1, 2, ...}"));
    }
    let xf = x as f64;
    let log_d = libm::log1p(-p);
    let f = |t: f64| {
        let decay = (xf - 1.0) * libm::log1p(-t);
        let ratio = xf * (log_d - libm::log1p(-p * (1.0 - t)));
        -libm::exp(decay) * -libm::expm1(ratio) / denominator(t)
    };
    integrate_on(f, truncation_point(p), 1.0, (None, Some(0.0)))
}

/// `I_p = ∫_{2p/(1+2p)}^1 dt / (-t log(1-t))`, the envelope constant with
/// `R_p(x) ≤ (1+2p)^{-(x-1)} I_p`.
pub fn i_p(p: f64) -> Result<f64> {
    check_p(p)?;
    integrate_on(
        |t| -1.0 / denominator(t),
        truncation_point(p),
        1.0,
        (None, Some(0.0)),
    )
}
