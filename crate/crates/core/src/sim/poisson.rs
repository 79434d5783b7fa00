//! Poisson variates: sequential inversion for small means and Hörmann's
//! transformed rejection with squeeze (PTRS) for `λ ≥ 30`.

use rand_core::RngCore;

use crate::numerics::special::ln_gamma;

const PTRS_THRESHOLD: f64 = 30.0;

/// A uniform variate on `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform01<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_poisson<R: RngCore>(rng: &mut R, lambda: f64) -> u64 {
    if lambda < PTRS_THRESHOLD {
        inversion(rng, lambda)
    } else {
        ptrs(rng, lambda)
    }
}

fn inversion<R: RngCore>(rng: &mut R, lambda: f64) -> u64 {
    let u = uniform01(rng);
    let mut k = 0u64;
    let mut mass = libm::exp(-lambda);
    let mut cdf = mass;
    // The cap only matters when rounding keeps the cdf below u.
    while u > cdf && k < 1000 {
        k += 1;
        mass *= lambda / k as f64;
        cdf += mass;
    }
    k
}

fn ptrs<R: RngCore>(rng: &mut R, lambda: f64) -> u64 {
    let slam = libm::sqrt(lambda);
    let loglam = libm::log(lambda);
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = uniform01(rng) - 0.5;
        let v = uniform01(rng);
        let us = 0.5 - u.abs();
        let k = libm::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = libm::log(v) + libm::log(inv_alpha) - libm::log(a / (us * us) + b);
        if lhs <= -lambda + k * loglam - ln_gamma(k + 1.0) {
            return k as u64;
        }
    }
}
