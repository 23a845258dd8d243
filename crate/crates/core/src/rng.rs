//! Seeded, splittable randomness.
//!
//! Every random quantity is drawn from a ChaCha stream addressed by
//! `(seed, stream)`, so work can be cut into chunks, run in parallel, and
//! merged in chunk order with identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Trials per parallel chunk.
pub const CHUNK: u64 = 2048;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Bernoulli estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_counts(successes: u64, samples: u64) -> Self {
        let mean = if samples == 0 { 0.0 } else { successes as f64 / samples as f64 };
        let std_error = if samples == 0 {
            0.0
        } else {
            (mean * (1.0 - mean) / samples as f64).sqrt()
        };
        Estimate {
            successes,
            samples,
            mean,
            std_error,
        }
    }

    /// Distance to `target` in standard errors. A zero standard error counts
    /// any mismatch as infinitely far.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.mean - target;
        if diff == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY * diff.signum()
        } else {
            diff / self.std_error
        }
    }
}

/// Runs `trial` `samples` times, chunk `c` drawing from stream `c`.
pub fn estimate<F>(seed: u64, samples: u64, trial: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum();
    Estimate::from_counts(successes, samples)
}

/// Maps `f` over `count` items, item `i` drawing from stream `i`; results
/// come back in item order.
pub fn map_streams<T, F>(seed: u64, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| f(i, &mut stream(seed, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn estimates_are_reproducible() {
        let a = estimate(5, 10_000, |r| r.gen_bool(0.3));
        let b = estimate(5, 10_000, |r| r.gen_bool(0.3));
        assert_eq!(a, b);
        assert!(a.z_score(0.3).abs() < 4.0);
        assert_ne!(a, estimate(6, 10_000, |r| r.gen_bool(0.3)));
    }
}
