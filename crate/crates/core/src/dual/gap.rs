//! KL divergences between channel output laws and dual distributions, and
//! the KL-gap profiles `x ↦ Δ(x)` against the affine duality line.

use alloc::vec::Vec;

use super::integrands::r_p;
use super::table::log_binom_conv;
use super::{DualDistribution, DualVariant};
use crate::channels::RepeatChannel;
use crate::numerics::special::ln_gamma;
use crate::{Error, Result};

/// Default number of inputs `x = 1..x_max` scanned for the gap infimum.
pub const DEFAULT_X_MAX: u64 = 500;

fn check_pairing(channel: &RepeatChannel, dual: &DualDistribution) -> Result<()> {
    if channel.family() != dual.variant().family() {
        return Err(Error::Unsupported(
            "dual variant does not match the channel family",
        ));
    }
    if (channel.param() - dual.p()).abs() > 0.0 {
        return Err(Error::Unsupported(
            "dual and channel use different replication parameters",
        ));
    }
    Ok(())
}

/// `D_KL(Y_x ‖ Y)` in nats, summed over `Y_x`'s support truncated at
/// mean + 40 standard deviations.
pub fn kl_divergence(channel: &RepeatChannel, x: u64, dual: &DualDistribution) -> Result<f64> {
    check_pairing(channel, dual)?;
    let law = channel.output_law(x)?;
    let (lo, _) = law.support();
    let mut kl = 0.0;
    for y in lo..=law.truncation_upper() {
        let lp = law.log_pmf(y);
        if lp == f64::NEG_INFINITY {
            continue;
        }
        let lq = dual.log_pmf(y)?;
        if lq == f64::NEG_INFINITY {
            return Err(Error::SupportMismatch { y });
        }
        kl += libm::exp(lp) * (lp - lq);
    }
    Ok(kl)
}

/// The gaps `Δ(x) = b + a E[Y_x] - D_KL(Y_x ‖ Y)` for `x = 1..x_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct KLGapProfile {
    pub line_slope: f64,
    pub line_intercept: f64,
    /// `gaps[x - 1] = Δ(x)`.
    pub gaps: Vec<f64>,
    /// Analytic value of `lim_{x→∞} Δ(x)`, when known.
    pub limit_candidate: Option<f64>,
}

/// Where the infimum of a gap profile was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapInfimum {
    pub value: f64,
    /// `None` when the limit candidate is the minimum.
    pub at_x: Option<u64>,
}

impl KLGapProfile {
    pub fn gap(&self, x: u64) -> Option<f64> {
        x.checked_sub(1)
            .and_then(|i| self.gaps.get(i as usize).copied())
    }

    /// Minimum over the scanned gaps and the limit candidate.
    pub fn infimum(&self) -> GapInfimum {
        infimum(&self.gaps, self.limit_candidate)
    }
}

pub(crate) fn infimum(gaps: &[f64], limit: Option<f64>) -> GapInfimum {
    let mut best = GapInfimum {
        value: f64::INFINITY,
        at_x: None,
    };
    for (i, &g) in gaps.iter().enumerate() {
        if g < best.value {
            best = GapInfimum {
                value: g,
                at_x: Some(i as u64 + 1),
            };
        }
    }
    if let Some(l) = limit {
        if l < best.value {
            best = GapInfimum {
                value: l,
                at_x: None,
            };
        }
    }
    best
}

/// `lim_{x→∞} Δ_δ(x)` for the variant, where it is known.
///
/// The zero-gap variants have limit `0`. The convexity-based gap tends to
/// `1/2` and the truncated one to `0`, both shifted by `-d log δ`. The
/// inverse binomial coincides with the convexity-based dual at `δ = d` up
/// to the line, whose intercept differs by `p log d`.
pub fn limit_candidate(variant: DualVariant, p: f64, delta: f64) -> Option<f64> {
    let d = 1.0 - p;
    let shift = d * libm::log(1.0 / delta);
    Some(match variant {
        DualVariant::StickyZeroGap | DualVariant::DuplicationZeroGap => 0.0,
        DualVariant::GeomDelConvexity => 0.5 + shift,
        DualVariant::GeomDelTruncated => shift,
        DualVariant::InverseBinomial => 0.5 - libm::log(d) + shift,
    })
}

/// Computes the gap profile by direct KL summation for every `x`.
pub fn kl_gap_profile(
    channel: &RepeatChannel,
    dual: &DualDistribution,
    x_max: u64,
) -> Result<KLGapProfile> {
    check_pairing(channel, dual)?;
    if x_max == 0 {
        return Err(Error::domain("x_max", 0.0, "{1, 2, ...}"));
    }
    let reach = channel.output_law(x_max)?.truncation_upper();
    let dual = dual.clone().with_cache_to(reach)?;
    let slope = dual.line_slope();
    let intercept = dual.line_intercept();
    let mut gaps = Vec::with_capacity(x_max as usize);
    for x in 1..=x_max {
        let mean = channel.output_law(x)?.mean();
        gaps.push(intercept + slope * mean - kl_divergence(channel, x, &dual)?);
    }
    Ok(KLGapProfile {
        line_slope: slope,
        line_intercept: intercept,
        gaps,
        limit_candidate: limit_candidate(dual.variant(), dual.p(), dual.delta()),
    })
}

/// `inf_{x ≥ 1} Δ(x)`, approximated by the scan `x = 1..x_max` together with
/// the limit candidate.
pub fn epsilon_inf(channel: &RepeatChannel, dual: &DualDistribution, x_max: u64) -> Result<f64> {
    Ok(kl_gap_profile(channel, dual, x_max)?.infimum().value)
}

/// Gap shift caused by the mass modification:
/// `Δ_δ(x) = Δ(x) - d log δ + d^x log δ`.
pub fn delta_shift(x: u64, p: f64, delta: f64) -> f64 {
    let d = 1.0 - p;
    let log_delta = libm::log(delta);
    -d * log_delta + libm::pow(d, x as f64) * log_delta
}

/// The q-independent gap of the convexity-based dual,
/// `Δ(x) = E[log binom(Y/p - 1, Y) - log binom(Y + x - 1, Y)]` with
/// `Y ~ NB(x, p)`.
pub fn conv_gap(x: u64, p: f64) -> Result<f64> {
    Ok(conv_gaps(x, x, p)?[0])
}

fn conv_gaps(x_lo: u64, x_hi: u64, p: f64) -> Result<Vec<f64>> {
    let channel = RepeatChannel::deletion(p)?;
    if x_lo == 0 {
        return Err(Error::domain("x", 0.0, "{1, 2, ...}"));
    }
    let reach = channel.output_law(x_hi)?.truncation_upper();
    let lg: Vec<f64> = (0..=reach + x_hi + 1)
        .map(|n| if n == 0 { 0.0 } else { ln_gamma(n as f64) })
        .collect();
    let lb: Vec<f64> = (0..=reach).map(|y| log_binom_conv(y as f64, p)).collect();
    let (log_p, log_d) = (libm::log(p), libm::log1p(-p));
    let mut out = Vec::with_capacity((x_hi - x_lo + 1) as usize);
    for x in x_lo..=x_hi {
        let hi = channel.output_law(x)?.truncation_upper() as usize;
        let xi = x as usize;
        let mut gap = 0.0;
        for y in 0..=hi {
            let log_nb_coef = lg[y + xi] - lg[xi] - lg[y + 1];
            let weight = libm::exp(log_nb_coef + x as f64 * log_d + y as f64 * log_p);
            gap += weight * (lb[y] - log_nb_coef);
        }
        out.push(gap);
    }
    Ok(out)
}

/// Base gaps (`δ = 1`) for `x = 1..x_max` from their closed forms: `0` for
/// the zero-gap variants, [`conv_gap`] for the convexity-based dual and
/// `R_p(x)` for the truncated one. Neither depends on `q`.
pub fn analytic_gaps(variant: DualVariant, p: f64, x_max: u64) -> Result<Vec<f64>> {
    if x_max == 0 {
        return Err(Error::domain("x_max", 0.0, "{1, 2, ...}"));
    }
    match variant {
        DualVariant::StickyZeroGap | DualVariant::DuplicationZeroGap => {
            Ok(alloc::vec![0.0; x_max as usize])
        }
        DualVariant::GeomDelConvexity => conv_gaps(1, x_max, p),
        DualVariant::GeomDelTruncated => (1..=x_max).map(|x| r_p(x, p)).collect(),
        DualVariant::InverseBinomial => Err(Error::Unsupported(
            "no closed-form gap route for the inverse binomial",
        )),
    }
}
