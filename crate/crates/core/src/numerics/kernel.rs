//! Building blocks for integrands of the form
//!
//! ```text
//!     (1 + c t - s * exp(u(t))) / (t log(1 - t)),     u(0) = 0, u'(0) = c
//! ```
//!
//! which is the shape of every integrand derived from the integral
//! representation of `log Γ`. The numerator vanishes to second order at
//! `t = 0`, so evaluating it term by term loses all precision for small `t`.
//! Writing `u(t) = Σ a_k log(1 + b_k t)` turns the numerator into
//! `Σ a_k ψ(b_k t) - φ(u)` with `ψ(x) = x - log(1 + x)` and
//! `φ(u) = e^u - 1 - u`, both of which are evaluated without cancellation.

/// `x - log(1 + x)` for `x > -1`, accurate near zero.
pub fn x_minus_log1p(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // Σ_{k≥2} (-1)^k x^k / k
        let mut sum = 0.0;
        let mut power = x * x;
        let mut k = 2.0;
        loop {
            let term = power / k;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() || k > 60.0 {
                break;
            }
            power *= -x;
            k += 1.0;
        }
        sum
    } else {
        x - libm::log1p(x)
    }
}

/// `e^u - 1 - u`, accurate near zero.
pub fn expm1_minus_x(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let mut sum = 0.0;
        let mut term = u * u / 2.0;
        let mut k = 2.0;
        loop {
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() || k > 40.0 {
                break;
            }
            k += 1.0;
            term *= u / k;
        }
        sum
    } else {
        libm::expm1(u) - u
    }
}

/// `t log(1 - t)`, the common denominator. Negative on `(0, 1)`.
#[inline]
pub fn denominator(t: f64) -> f64 {
    t * libm::log1p(-t)
}

/// Numerator `1 + c t - exp(Σ a_k log(1 + b_k t))` with `c = Σ a_k b_k`.
///
/// Valid while every `1 + b_k t` is positive.
#[derive(Debug, Clone, Copy)]
pub struct LogLinear<const N: usize> {
    pub a: [f64; N],
    pub b: [f64; N],
}

impl<const N: usize> LogLinear<N> {
    pub fn new(a: [f64; N], b: [f64; N]) -> Self {
        Self { a, b }
    }

    /// Linear coefficient `c`.
    pub fn slope(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| a * b).sum()
    }

    pub fn exponent(&self, t: f64) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .filter(|(a, _)| **a != 0.0)
            .map(|(a, b)| a * libm::log1p(b * t))
            .sum()
    }

    pub fn numerator(&self, t: f64) -> f64 {
        let largest = self.b.iter().fold(0.0f64, |m, b| m.max((b * t).abs()));
        if largest >= 0.5 {
            // Away from t = 0 the terms are of order one and no cancellation
            // is left to avoid.
            return 1.0 + self.slope() * t - libm::exp(self.exponent(t));
        }
        let linear: f64 = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a * x_minus_log1p(b * t))
            .sum();
        linear - expm1_minus_x(self.exponent(t))
    }

    /// The full integrand numerator / (t log(1 - t)).
    pub fn integrand(&self, t: f64) -> f64 {
        self.numerator(t) / denominator(t)
    }

    /// Limit of the integrand as `t -> 0`, from the second-order expansion
    /// of the numerator against `t log(1 - t) = -t^2 + O(t^3)`.
    pub fn limit_at_zero(&self) -> f64 {
        let c = self.slope();
        let curvature: f64 = self.a.iter().zip(&self.b).map(|(a, b)| a * b * b).sum();
        (c * c - curvature) / 2.0
    }
}
