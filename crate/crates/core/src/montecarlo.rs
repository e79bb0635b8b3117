//! Sampling estimates for systems whose composition space is too large to
//! enumerate.
//!
//! Randomness comes from ChaCha8 seeded with the master seed. Trials are cut
//! into fixed-size chunks and chunk `i` draws from stream `i` of that seed, so
//! an estimate depends only on `(system, trials, seed)` and never on how many
//! threads ran it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{excess_of_counts, ElectoralSystem, Tally};

pub const MIN_TRIALS: u64 = 100;

const CHUNK_TRIALS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Inverse-CDF sampler over the party probabilities.
#[derive(Debug, Clone)]
pub struct TallySampler {
    cumulative: Vec<f64>,
    last_possible: usize,
    electors: u64,
}

impl TallySampler {
    pub fn new(sys: &ElectoralSystem) -> Self {
        let mut acc = 0.0;
        let cumulative = sys
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // Float slack in Σp may leave u ≥ the final cumulative value; such
        // draws go to the last party that can actually be chosen.
        let last_possible = sys.probs().iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Self { cumulative, last_possible, electors: sys.electors() }
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, counts: &mut [u64]) {
        counts.fill(0);
        for _ in 0..self.electors {
            let u: f64 = rng.random();
            let k = self.cumulative.partition_point(|&c| c <= u).min(self.last_possible);
            counts[k] += 1;
        }
    }
}

/// One vote: each elector independently picks party `k` with probability `p_k`.
pub fn sample_tally<R: Rng + ?Sized>(sys: &ElectoralSystem, rng: &mut R) -> Tally {
    let mut counts = vec![0; sys.parties()];
    TallySampler::new(sys).sample_into(rng, &mut counts);
    Tally::new(counts)
}

/// Welford accumulator, merged with Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }
}

/// Sample mean of `f(tally)` over `trials` seeded votes.
pub fn estimate_mean<F>(sys: &ElectoralSystem, trials: u64, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&[u64]) -> f64 + Sync,
{
    if trials < MIN_TRIALS {
        return Err(Error::TooFewTrials { trials, min: MIN_TRIALS });
    }
    let sampler = TallySampler::new(sys);
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let partials: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = CHUNK_TRIALS.min(trials - chunk * CHUNK_TRIALS);
            let mut counts = vec![0; sys.parties()];
            let mut moments = Moments::default();
            for _ in 0..len {
                sampler.sample_into(&mut rng, &mut counts);
                moments.push(f(&counts));
            }
            moments
        })
        .collect();
    let total = partials.into_iter().fold(Moments::default(), Moments::merge);
    let sample_var = total.m2.max(0.0) / (total.count - 1) as f64;
    Ok(McEstimate {
        mean: total.mean,
        std_error: (sample_var / total.count as f64).sqrt(),
        trials,
        seed,
    })
}

/// Sampled `⟨Σ_k (N_k − p_k N)²⟩`.
pub fn estimate_variance(sys: &ElectoralSystem, trials: u64, seed: u64) -> Result<McEstimate> {
    estimate_mean(sys, trials, seed, |counts| {
        excess_of_counts(counts, sys).iter().map(|x| x * x).sum()
    })
}

/// Sampled probability that party `party` (1-based) receives exactly `count`
/// electors.
pub fn estimate_marginal(
    sys: &ElectoralSystem,
    party: usize,
    count: u64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if party == 0 || party > sys.parties() {
        return Err(Error::IndexOutOfRange { index: party, parties: sys.parties() });
    }
    if count > sys.electors() {
        return Err(Error::CountOutOfRange { count, electors: sys.electors() });
    }
    estimate_mean(sys, trials, seed, |counts| if counts[party - 1] == count { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_system;

    #[test]
    fn certain_outcome_is_deterministic() {
        let sys = validate_system(5, &[0.0, 0.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            assert_eq!(sample_tally(&sys, &mut rng), Tally::new(vec![0, 0, 5]));
        }
    }

    #[test]
    fn single_elector_is_one_hot() {
        let sys = validate_system(1, &[0.5, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [false; 2];
        for _ in 0..100 {
            let t = sample_tally(&sys, &mut rng);
            assert_eq!(t.total(), 1);
            seen[t.counts().iter().position(|&c| c == 1).unwrap()] = true;
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn large_sample_proportions_within_five_sigma() {
        let n = 100_000u64;
        let sys = validate_system(n as i64, &[0.1, 0.3, 0.6]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let t = sample_tally(&sys, &mut rng);
        assert_eq!(t.total(), n);
        for (&c, &p) in t.counts().iter().zip(sys.probs()) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - p).abs() <= 5.0 * sigma);
        }
    }

    #[test]
    fn slack_in_normalization_never_picks_impossible_party() {
        let sys = validate_system(50, &[0.5, 0.4999999995, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            assert_eq!(sample_tally(&sys, &mut rng).counts()[2], 0);
        }
    }

    #[test]
    fn variance_estimate_near_table_two_value() {
        let sys = validate_system(5, &[0.1, 0.3, 0.6]).unwrap();
        let est = estimate_variance(&sys, 200_000, 11).unwrap();
        assert!((est.mean - 2.7).abs() <= 4.0 * est.std_error, "{est:?}");
        assert!(est.std_error > 0.0);
    }

    #[test]
    fn one_party_has_no_fluctuation() {
        let sys = validate_system(9, &[1.0]).unwrap();
        let est = estimate_variance(&sys, 1000, 5).unwrap();
        assert_eq!((est.mean, est.std_error), (0.0, 0.0));
    }

    #[test]
    fn estimates_are_reproducible() {
        let sys = validate_system(40, &[0.2, 0.3, 0.5]).unwrap();
        let a = estimate_variance(&sys, 20_000, 99).unwrap();
        let b = estimate_variance(&sys, 20_000, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let c = estimate_variance(&sys, 20_000, 100).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn too_few_trials() {
        let sys = validate_system(5, &[0.5, 0.5]).unwrap();
        assert_eq!(
            estimate_variance(&sys, 99, 0),
            Err(Error::TooFewTrials { trials: 99, min: 100 })
        );
    }

    #[test]
    fn marginal_estimate_tracks_binomial() {
        let sys = validate_system(5, &[0.1, 0.3, 0.6]).unwrap();
        let est = estimate_marginal(&sys, 1, 1, 100_000, 8).unwrap();
        assert!((est.mean - 0.328_05).abs() <= 4.0 * est.std_error);
        assert!(estimate_marginal(&sys, 4, 1, 1000, 8).is_err());
        assert!(estimate_marginal(&sys, 1, 6, 1000, 8).is_err());
    }

    #[test]
    fn chunk_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..10_000).map(|i| ((i * 37) % 101) as f64 * 0.5).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let merged = xs
            .chunks(777)
            .map(|c| {
                let mut m = Moments::default();
                c.iter().for_each(|&x| m.push(x));
                m
            })
            .fold(Moments::default(), Moments::merge);
        assert_eq!(merged.count, whole.count);
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-8 * whole.m2);
    }
}
