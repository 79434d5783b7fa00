//! Numerical substrate shared by every other module.

pub mod kernel;
pub mod optimize;
pub mod quadrature;
pub mod series;
pub mod special;

pub use optimize::{maximize_concave, maximize_scanning, Maximum};
pub use quadrature::{integrate, Integral, QuadratureProblem};
pub use series::{sum_series, SeriesSpec, SeriesSum};
pub use special::{
    binary_entropy, eta_integral, log_gamma, log_gamma_via_integral, log_integral_li,
};

/// Numerically stable `log(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}
