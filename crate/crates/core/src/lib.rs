//! Analytical capacity upper bounds for binary repeat channels.
//!
//! A repeat channel replaces every input bit by a random number of copies of
//! itself. This crate covers three replication rules (geometric on
//! `{1, 2, ...}`, one-or-two copies, geometric on `{0, 1, ...}`) and builds,
//! for each of them, an explicit family of candidate output distributions
//! whose KL-gap against an affine line is known in closed form. Feeding those
//! distributions to the mean-limited duality bound and maximizing over the
//! family parameter `q` yields the capacity upper bounds in [`bounds`].
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; IO, parallel sweeps and the command-line driver
//! live in the `repeatcap` crate.
//!
//! Layout:
//!
//! - [`numerics`]: special functions, adaptive Gauss–Kronrod quadrature,
//!   log-space series summation and a robust 1-D maximizer.
//! - [`channels`]: replication laws and the conditional output laws `Y_x` of
//!   the associated memoryless integer channels.
//! - [`dual`]: the candidate output distributions, KL divergences and gaps.
//! - [`bounds`]: the capacity bounds, sweeps and reference-table checks.
//! - [`sim`]: Monte Carlo simulation of the Poisson-repeat channel with the
//!   run-length decoder.
#![no_std]
#![deny(unsafe_code)]
// Numerical code indexes into tables by integer output value everywhere.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod bounds;
pub mod channels;
pub mod dual;
mod error;
pub mod numerics;
pub mod sim;

pub use error::{Error, Result};

/// Natural log of 2, for converting nats to bits at reporting boundaries.
pub const LN_2: f64 = core::f64::consts::LN_2;

/// Converts an information quantity in nats to bits.
#[inline]
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}
