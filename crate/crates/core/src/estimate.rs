//! Estimation modes, seeded random streams and sample statistics shared by
//! the Monte Carlo estimators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitcore::CompensatedSum;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// How a reported number was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

impl std::fmt::Display for EstimateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimateMode::Exact => "exact",
            EstimateMode::MonteCarlo => "monte-carlo",
        })
    }
}

/// Requested computation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Random stream `stream` of the family keyed by `seed`. Streams are
/// independent of how work is scheduled across threads.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean and 95% half-width of the mean of i.i.d. samples, accumulated in
/// the order given.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSummary {
    pub count: u64,
    pub mean: f64,
    pub std_error: f64,
}

impl SampleSummary {
    pub fn from_samples(samples: &[f64]) -> Self {
        let count = samples.len() as u64;
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                std_error: f64::NAN,
            };
        }
        let mean = samples.iter().copied().collect::<CompensatedSum>().total() / count as f64;
        let std_error = if count > 1 {
            let ss = samples
                .iter()
                .map(|v| (v - mean) * (v - mean))
                .collect::<CompensatedSum>()
                .total();
            (ss / (count - 1) as f64).sqrt() / (count as f64).sqrt()
        } else {
            0.0
        };
        Self {
            count,
            mean,
            std_error,
        }
    }

    pub fn ci95(&self) -> f64 {
        Z95 * self.std_error
    }
}

/// Half-width of the 95% normal interval for a Bernoulli proportion.
pub fn proportion_ci95(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = successes as f64 / trials as f64;
    Z95 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |seed, stream| {
            let mut rng = stream_rng(seed, stream);
            (0..4).map(|_| rng.random()).collect::<Vec<u64>>()
        };
        let (a, b, c) = (draw(7, 3), draw(7, 3), draw(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn summary_of_constant_samples_has_zero_error() {
        let s = SampleSummary::from_samples(&[1.0; 10]);
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.std_error, 0.0);
    }

    #[test]
    fn summary_matches_textbook_formula() {
        let s = SampleSummary::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        let var: f64 = 5.0 / 3.0;
        assert!((s.std_error - (var / 4.0).sqrt()).abs() < 1e-15);
    }
}
