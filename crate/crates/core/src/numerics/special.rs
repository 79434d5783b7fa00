//! Special functions: log-gamma, binary entropy, the logarithmic integral
//! and the companion integral `η(z) = ∫_0^z dt / ((1 - t) log t)`.

use super::kernel::LogLinear;
use super::quadrature::{integrate, QuadratureProblem};
use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `log Γ(z)` for `z > 0`.
///
/// Backed by the FreeBSD/musl `lgamma` port in `libm`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain("z", z, "(0, inf)"));
    }
    Ok(libm::lgamma(z))
}

/// `log Γ(z)` without the domain check, for hot loops with validated input.
#[inline]
pub(crate) fn ln_gamma(z: f64) -> f64 {
    libm::lgamma(z)
}

/// `log Γ(1 + z)` through its integral representation
///
/// ```text
///     log Γ(1 + z) = ∫_0^1 (1 - t z - (1 - t)^z) / (t log(1 - t)) dt,   z ≥ 0.
/// ```
///
/// Serves as an independent check on [`log_gamma`].
pub fn log_gamma_via_integral(z: f64, tol: f64) -> Result<f64> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::domain("z", z, "[0, inf)"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let kernel = LogLinear::new([z], [-1.0]);
    let problem = QuadratureProblem::new(|t| kernel.integrand(t), 0.0, 1.0)
        .with_limits(Some(kernel.limit_at_zero()), Some(0.0))
        .with_abs_tol(tol)
        .with_rel_tol(0.0);
    Ok(integrate(&problem)?.value)
}

/// Binary entropy in nats.
///
/// `p` must lie in `(0, 1)`; with `allow_endpoints` the values `0` and `1`
/// are accepted and map to `0`.
pub fn binary_entropy(p: f64, allow_endpoints: bool) -> Result<f64> {
    if allow_endpoints && (p == 0.0 || p == 1.0) {
        return Ok(0.0);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "(0, 1)"));
    }
    Ok(-p * libm::log(p) - (1.0 - p) * libm::log1p(-p))
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-s}/s ds` for `x > 0`.
pub(crate) fn exp_integral_e1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        // -γ - ln x - Σ_{k≥1} (-x)^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        let mut k = 1.0;
        loop {
            term *= -x / k;
            let contribution = term / k;
            sum += contribution;
            if contribution.abs() < 1e-17 * sum.abs().max(1e-300) || k > 100.0 {
                break;
            }
            k += 1.0;
        }
        -EULER_GAMMA - libm::log(x) - sum
    } else {
        // Modified Lentz evaluation of the continued fraction.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * libm::exp(-x)
    }
}

/// Logarithmic integral `Li(z) = ∫_0^z dt / log t` on `(0, 1)`.
///
/// Evaluated as `-E1(-log z)`; the result is negative.
pub fn log_integral_li(z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain("z", z, "(0, 1)"));
    }
    Ok(-exp_integral_e1(-libm::log(z)))
}

/// `η(z) = ∫_0^z dt / ((1 - t) log t)` on `(0, 1)`.
///
/// Expanding `1/(1 - t)` and substituting `u = t^n` gives
/// `η(z) = Σ_{n≥1} Li(z^n)`, a series of negative terms decaying like `z^n`.
pub fn eta_integral(z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain("z", z, "(0, 1)"));
    }
    let step = -libm::log(z);
    let mut sum = 0.0;
    let mut n = 1.0;
    loop {
        let term = -exp_integral_e1(n * step);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || n > 1e7 {
            break;
        }
        n += 1.0;
    }
    Ok(sum)
}
