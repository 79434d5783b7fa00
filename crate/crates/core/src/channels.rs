//! Repeat-channel families and the conditional output laws `Y_x` of their
//! associated memoryless integer channels.
//!
//! A repeat channel acts on each maximal run of equal input bits
//! independently. A run of length `x` comes out as a run of length
//! `Y_x = D_1 + ... + D_x` where the `D_i` are i.i.d. copies of the
//! replication law. For the three parametrized families:
//!
//! | family        | `D`                      | `Y_x`                 |
//! |---------------|--------------------------|-----------------------|
//! | sticky        | geometric on `{1, 2, ..}`| `x + NB(x, p)`        |
//! | duplication   | `1 + Bernoulli(p)`       | `x + Bin(x, p)`       |
//! | deletion      | geometric on `{0, 1, ..}`| `NB(x, p)`            |

use crate::numerics::special::ln_gamma;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    GeometricSticky,
    ElementaryDuplication,
    GeometricDeletion,
    PoissonRepeat,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::GeometricSticky => "sticky",
            Family::ElementaryDuplication => "duplication",
            Family::GeometricDeletion => "geomdel",
            Family::PoissonRepeat => "poisson",
        }
    }
}

/// A repeat channel: family plus its parameter (`p` for the first three
/// families, the mean `λ` for the Poisson family).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatChannel {
    family: Family,
    param: f64,
}

impl RepeatChannel {
    pub fn new(family: Family, param: f64) -> Result<Self> {
        let ok = match family {
            Family::PoissonRepeat => param > 0.0 && param.is_finite(),
            _ => param > 0.0 && param < 1.0,
        };
        if !ok {
            let domain = match family {
                Family::PoissonRepeat => "(0, inf)",
                _ => "(0, 1)",
            };
            let what = match family {
                Family::PoissonRepeat => "lambda",
                _ => "p",
            };
            return Err(Error::domain(what, param, domain));
        }
        Ok(Self { family, param })
    }

    pub fn sticky(p: f64) -> Result<Self> {
        Self::new(Family::GeometricSticky, p)
    }

    pub fn duplication(p: f64) -> Result<Self> {
        Self::new(Family::ElementaryDuplication, p)
    }

    pub fn deletion(p: f64) -> Result<Self> {
        Self::new(Family::GeometricDeletion, p)
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::new(Family::PoissonRepeat, lambda)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Log-probability that a single bit is replicated `y` times.
    pub fn replication_log_pmf(&self, y: u64) -> f64 {
        let p = self.param;
        let yf = y as f64;
        match self.family {
            Family::GeometricSticky if y >= 1 => libm::log1p(-p) + (yf - 1.0) * libm::log(p),
            Family::GeometricSticky => f64::NEG_INFINITY,
            Family::ElementaryDuplication => match y {
                1 => libm::log1p(-p),
                2 => libm::log(p),
                _ => f64::NEG_INFINITY,
            },
            Family::GeometricDeletion => libm::log1p(-p) + yf * libm::log(p),
            Family::PoissonRepeat => yf * libm::log(p) - p - ln_gamma(yf + 1.0),
        }
    }

    /// The law of `Y_x`. Unsupported for the Poisson family, which is only
    /// treated by simulation.
    pub fn output_law(&self, x: u64) -> Result<ConditionalOutputLaw> {
        if self.family == Family::PoissonRepeat {
            return Err(Error::Unsupported(
                "the Poisson-repeat channel has no conditional output law pathway",
            ));
        }
        if x == 0 {
            return Err(Error::domain("x", 0.0, "{1, 2, ...}"));
        }
        Ok(ConditionalOutputLaw { channel: *self, x })
    }

    /// The reduction parameters `(λ, λ̄, 1 - D(0))`.
    pub fn reduction_params(&self) -> Result<ReductionParams> {
        let p = self.param;
        match self.family {
            Family::GeometricSticky => Ok(ReductionParams {
                lambda: 1.0 / (1.0 - p),
                lambda_bar: 1.0 / (1.0 - p),
                p_nonzero: 1.0,
            }),
            Family::ElementaryDuplication => Ok(ReductionParams {
                lambda: 1.0 + p,
                lambda_bar: 1.0 + p,
                p_nonzero: 1.0,
            }),
            Family::GeometricDeletion => Ok(ReductionParams {
                lambda: p / (1.0 - p),
                lambda_bar: 1.0 / (1.0 - p),
                p_nonzero: p,
            }),
            Family::PoissonRepeat => Err(Error::Unsupported(
                "reduction parameters are defined for the p-parametrized families only",
            )),
        }
    }
}

/// Mean replication `λ = E[D]`, mean conditioned on `D ≠ 0`, and the
/// probability `1 - D(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionParams {
    pub lambda: f64,
    pub lambda_bar: f64,
    pub p_nonzero: f64,
}

/// The output law `Y_x` for an input run of length `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalOutputLaw {
    channel: RepeatChannel,
    x: u64,
}

impl ConditionalOutputLaw {
    pub fn channel(&self) -> RepeatChannel {
        self.channel
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn log_pmf(&self, y: u64) -> f64 {
        let p = self.channel.param;
        let (x, yf) = (self.x as f64, y as f64);
        match self.channel.family {
            Family::GeometricSticky => {
                if y < self.x {
                    return f64::NEG_INFINITY;
                }
                let extra = yf - x;
                ln_gamma(yf) - ln_gamma(x) - ln_gamma(extra + 1.0)
                    + x * libm::log1p(-p)
                    + xlogy(extra, p)
            }
            Family::ElementaryDuplication => {
                if y < self.x || y > 2 * self.x {
                    return f64::NEG_INFINITY;
                }
                let extra = yf - x;
                ln_gamma(x + 1.0) - ln_gamma(extra + 1.0) - ln_gamma(x - extra + 1.0)
                    + (x - extra) * libm::log1p(-p)
                    + xlogy(extra, p)
            }
            Family::GeometricDeletion => {
                ln_gamma(yf + x) - ln_gamma(x) - ln_gamma(yf + 1.0)
                    + x * libm::log1p(-p)
                    + xlogy(yf, p)
            }
            Family::PoissonRepeat => unreachable!("rejected by output_law"),
        }
    }

    pub fn pmf(&self, y: u64) -> f64 {
        libm::exp(self.log_pmf(y))
    }

    pub fn mean(&self) -> f64 {
        let p = self.channel.param;
        let x = self.x as f64;
        match self.channel.family {
            Family::GeometricSticky => x / (1.0 - p),
            Family::ElementaryDuplication => x * (1.0 + p),
            Family::GeometricDeletion => x * p / (1.0 - p),
            Family::PoissonRepeat => unreachable!("rejected by output_law"),
        }
    }

    pub fn stddev(&self) -> f64 {
        let p = self.channel.param;
        let x = self.x as f64;
        match self.channel.family {
            Family::GeometricSticky | Family::GeometricDeletion => libm::sqrt(x * p) / (1.0 - p),
            Family::ElementaryDuplication => libm::sqrt(x * p * (1.0 - p)),
            Family::PoissonRepeat => unreachable!("rejected by output_law"),
        }
    }

    /// Smallest and largest output with positive mass (`None` when unbounded).
    pub fn support(&self) -> (u64, Option<u64>) {
        match self.channel.family {
            Family::GeometricSticky => (self.x, None),
            Family::ElementaryDuplication => (self.x, Some(2 * self.x)),
            _ => (0, None),
        }
    }

    /// Upper end of the finite window `[support.0, mean + 40 sd]` used for
    /// summations over `Y_x`.
    pub fn truncation_upper(&self) -> u64 {
        let cutoff = libm::ceil(self.mean() + 40.0 * self.stddev()) as u64;
        match self.support().1 {
            Some(hi) => hi.min(cutoff.max(self.x)),
            None => cutoff.max(self.support().0),
        }
    }

    /// Probability generating function `E[z^{Y_x}]` for `z ∈ [0, 1]`.
    pub fn pgf(&self, z: f64) -> Result<f64> {
        let p = self.channel.param;
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::domain("z", z, "[0, 1]"));
        }
        let x = self.x as f64;
        let base = match self.channel.family {
            Family::GeometricSticky => z * (1.0 - p) / (1.0 - p * z),
            Family::ElementaryDuplication => z * (1.0 - p + p * z),
            Family::GeometricDeletion => (1.0 - p) / (1.0 - p * z),
            Family::PoissonRepeat => unreachable!("rejected by output_law"),
        };
        Ok(libm::pow(base, x))
    }
}

/// `a log b` with the convention `0 log 0 = 0`.
#[inline]
fn xlogy(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * libm::log(b)
    }
}

/// Log-pmf of `Y_x` for the given channel.
pub fn output_log_pmf(channel: &RepeatChannel, x: u64, y: u64) -> Result<f64> {
    Ok(channel.output_law(x)?.log_pmf(y))
}

/// Closed-form mean of `Y_x`.
pub fn output_mean(channel: &RepeatChannel, x: u64) -> Result<f64> {
    Ok(channel.output_law(x)?.mean())
}

pub fn pgf(channel: &RepeatChannel, x: u64, z: f64) -> Result<f64> {
    channel.output_law(x)?.pgf(z)
}

pub fn reduction_params(channel: &RepeatChannel) -> Result<ReductionParams> {
    channel.reduction_params()
}
