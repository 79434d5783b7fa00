//! Monte Carlo simulation of the Poisson-repeat channel and its run-length
//! decoder.
//!
//! Every input bit is replaced by an independent Poisson(λ) number of
//! copies. For large λ, dividing each output run length by λ and rounding
//! recovers the input up to a small fraction of edits, which is what
//! [`run_monte_carlo`] measures.

mod poisson;

pub use poisson::{sample_poisson, uniform01};

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result};

/// Draws replication counts.
pub trait ReplicationSampler {
    fn replications(&mut self, lambda: f64) -> u64;
}

/// Poisson replication counts from a random source.
pub struct PoissonReplication<R>(pub R);

impl<R: RngCore> ReplicationSampler for PoissonReplication<R> {
    fn replications(&mut self, lambda: f64) -> u64 {
        sample_poisson(&mut self.0, lambda)
    }
}

/// Replicates every bit a fixed number of times.
#[derive(Debug, Clone, Copy)]
pub struct FixedReplication(pub u64);

impl ReplicationSampler for FixedReplication {
    fn replications(&mut self, _lambda: f64) -> u64 {
        self.0
    }
}

/// Concatenates `L_i` copies of each `x_i`, with `L_i` drawn from `sampler`.
pub fn sample_channel_output<S: ReplicationSampler>(
    x: &[u8],
    lambda: f64,
    sampler: &mut S,
) -> Vec<u8> {
    let mut out = Vec::with_capacity((x.len() as f64 * lambda) as usize);
    for &bit in x {
        let copies = sampler.replications(lambda);
        out.extend(core::iter::repeat_n(bit, copies as usize));
    }
    out
}

/// Maps every maximal run of length `L` to `round(L / λ)` copies of its bit,
/// rounding halves up.
pub fn run_length_decode(y: &[u8], lambda: f64) -> Vec<u8> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < y.len() {
        let bit = y[i];
        let start = i;
        while i < y.len() && y[i] == bit {
            i += 1;
        }
        let copies = libm::floor((i - start) as f64 / lambda + 0.5) as usize;
        out.extend(core::iter::repeat_n(bit, copies));
    }
    out
}

/// Levenshtein distance with unit costs, in `O(|a| |b|)` time and
/// `O(min(|a|, |b|))` memory.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, x) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let above = row[j + 1];
            let substitute = diag + usize::from(x != y);
            row[j + 1] = substitute.min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[short.len()]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    UniformRandom,
    Alternating,
    Fixed(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub lambda: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub input: InputSource,
}

impl SimConfig {
    pub fn new(n: usize, lambda: f64, epsilon: f64, trials: usize, seed: u64) -> Self {
        Self {
            n,
            lambda,
            epsilon,
            trials,
            seed,
            input: InputSource::UniformRandom,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("n", 0.0, "{1, 2, ...}"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain("lambda", self.lambda, "(0, inf)"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain("epsilon", self.epsilon, "(0, 1)"));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials", 0.0, "{1, 2, ...}"));
        }
        if let InputSource::Fixed(bits) = &self.input {
            if bits.len() != self.n || bits.iter().any(|&b| b > 1) {
                return Err(Error::Unsupported(
                    "the supplied input must hold exactly n bits, each 0 or 1",
                ));
            }
        }
        Ok(())
    }

    /// The random stream of trial `index`: the seed selects the key and the
    /// trial index selects the stream, so trials are independent and can
    /// run in any order.
    pub fn trial_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    fn input_bits<R: RngCore>(&self, rng: &mut R) -> Vec<u8> {
        match &self.input {
            InputSource::UniformRandom => {
                let mut bits = Vec::with_capacity(self.n);
                while bits.len() < self.n {
                    let word = rng.next_u64();
                    let take = (self.n - bits.len()).min(64);
                    bits.extend((0..take).map(|k| ((word >> k) & 1) as u8));
                }
                bits
            }
            InputSource::Alternating => (0..self.n).map(|i| (i % 2) as u8).collect(),
            InputSource::Fixed(bits) => bits.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialReport {
    pub edit_distance: usize,
    pub output_length: usize,
    /// `edit_distance ≤ ε n`.
    pub success: bool,
}

/// Sends `x` through the channel with `sampler`, decodes and scores it.
pub fn run_trial_with<S: ReplicationSampler>(
    config: &SimConfig,
    x: &[u8],
    sampler: &mut S,
) -> TrialReport {
    let y = sample_channel_output(x, config.lambda, sampler);
    let decoded = run_length_decode(&y, config.lambda);
    let ed = edit_distance(x, &decoded);
    TrialReport {
        edit_distance: ed,
        output_length: y.len(),
        success: ed as f64 <= config.epsilon * x.len() as f64,
    }
}

/// Runs trial `index` on its own random stream.
pub fn run_trial(config: &SimConfig, index: u64) -> TrialReport {
    let mut rng = config.trial_rng(index);
    let x = config.input_bits(&mut rng);
    run_trial_with(config, &x, &mut PoissonReplication(rng))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub success_rate: f64,
    pub mean_output_length: f64,
    pub reports: Vec<TrialReport>,
}

impl MonteCarloSummary {
    /// Aggregates trial reports given in trial order.
    pub fn from_reports(reports: Vec<TrialReport>) -> Self {
        let n = reports.len().max(1) as f64;
        let successes = reports.iter().filter(|r| r.success).count();
        let total: usize = reports.iter().map(|r| r.output_length).sum();
        Self {
            success_rate: successes as f64 / n,
            mean_output_length: total as f64 / n,
            reports,
        }
    }
}

/// Runs all trials of `config` sequentially.
pub fn run_monte_carlo(config: &SimConfig) -> Result<MonteCarloSummary> {
    config.validate()?;
    let reports = (0..config.trials as u64)
        .map(|i| run_trial(config, i))
        .collect();
    Ok(MonteCarloSummary::from_reports(reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn forced_duplication() {
        let y = sample_channel_output(&[0, 1], 2.0, &mut FixedReplication(2));
        assert_eq!(y, vec![0, 0, 1, 1]);
    }

    #[test]
    fn decoder_examples() {
        assert_eq!(run_length_decode(&[0, 0, 0, 1, 1, 1], 3.0), vec![0, 1]);
        assert!(run_length_decode(&[], 4.0).is_empty());
        assert_eq!(run_length_decode(&[0; 5], 2.0), vec![0, 0, 0]);
        // A short run rounds to nothing.
        assert_eq!(run_length_decode(&[0, 0, 0, 1, 0, 0, 0], 3.0), vec![0, 0]);
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance(&[0u8, 1, 0, 1], &[0, 1, 0, 1]), 0);
        assert_eq!(edit_distance(&[0u8, 1, 0, 1], &[]), 4);
        assert_eq!(edit_distance(b"kitten", b"sitting"), 3);
        assert_eq!(edit_distance(b"sitting", b"kitten"), 3);
        assert_eq!(edit_distance(b"flaw", b"lawn"), 2);
    }

    #[test]
    fn identity_channel_decodes_exactly() {
        let cfg = SimConfig::new(64, 1.0, 0.1, 1, 3);
        let mut rng = cfg.trial_rng(0);
        let x = cfg.input_bits(&mut rng);
        let r = run_trial_with(&cfg, &x, &mut FixedReplication(1));
        assert_eq!(r.edit_distance, 0);
        assert_eq!(r.output_length, 64);
        assert!(r.success);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(10, 0.0, 0.1, 1, 0).validate().is_err());
        assert!(SimConfig::new(10, 2.0, 1.0, 1, 0).validate().is_err());
        assert!(SimConfig::new(10, 2.0, 0.1, 0, 0).validate().is_err());
        assert!(SimConfig::new(0, 2.0, 0.1, 1, 0).validate().is_err());
        let mut c = SimConfig::new(3, 2.0, 0.1, 1, 0);
        c.input = InputSource::Fixed(vec![0, 1]);
        assert!(c.validate().is_err());
        c.input = InputSource::Fixed(vec![0, 1, 1]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn trials_are_reproducible_and_distinct() {
        let cfg = SimConfig::new(200, 5.0, 0.2, 3, 11);
        let a = run_monte_carlo(&cfg).unwrap();
        let b = run_monte_carlo(&cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.reports[0].output_length, a.reports[1].output_length);
        assert_eq!(run_trial(&cfg, 2), a.reports[2]);
    }
}
