//! Reproducible Monte-Carlo estimation.
//!
//! Every trial owns counter-derived RNG substreams ([`Substreams`]), so
//! samples are a pure function of `(seed, trial index)` and never depend
//! on scheduling. Trials are processed in fixed-size chunks whose
//! statistics are merged in chunk order, which makes the resulting mean
//! and variance bit-identical for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Trials per reduction chunk. Fixed so chunk boundaries (and therefore
/// the merge tree) never depend on the number of workers.
const CHUNK_TRIALS: u64 = 1024;

/// Largest supported trial index; lane bits occupy the top byte of the
/// ChaCha stream id.
const MAX_TRIALS: u64 = 1 << 56;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum McError {
    #[error("at least 2 trials are required for a variance estimate, got {0}")]
    TooFewTrials(u64),
    #[error("trial count {0} exceeds the supported maximum 2^56")]
    TooManyTrials(u64),
}

/// Counter-based RNG substreams for one trial.
///
/// Lanes are independent streams of the same keyed generator; samplers
/// use separate lanes for quantities that must stay aligned across model
/// variants (e.g. fading amplitudes on one lane, impairment draws on
/// another, so enabling an impairment does not disturb the fading).
#[derive(Debug, Clone, Copy)]
pub struct Substreams {
    seed: u64,
    trial: u64,
}

impl Substreams {
    pub fn new(seed: u64, trial: u64) -> Self {
        Self { seed, trial }
    }

    /// Generator for the given lane of this trial.
    pub fn lane(&self, lane: u8) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((lane as u64) << 56) | self.trial);
        rng
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }
}

/// Result of a Monte-Carlo estimation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// 95% confidence half-width `1.96 * s / sqrt(trials)`.
    pub ci_half_width_95: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Streaming (Welford) accumulator for one output cell.
#[derive(Debug, Clone, Copy)]
struct CellAcc {
    count: u64,
    mean: f64,
    m2: f64,
}

impl CellAcc {
    fn new() -> Self {
        Self { count: 0, mean: 0.0, m2: 0.0 }
    }

    #[inline]
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise merge; exact for the chunked reduction.
    fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + delta * (other.count as f64 / count as f64),
            m2: self.m2 + other.m2
                + delta * delta * (self.count as f64 * other.count as f64 / count as f64),
        }
    }

    fn into_estimate(self, seed: u64) -> McEstimate {
        let n = self.count as f64;
        let sample_var = if self.count > 1 { self.m2 / (n - 1.0) } else { 0.0 };
        McEstimate {
            mean: self.mean,
            ci_half_width_95: 1.96 * (sample_var / n).sqrt(),
            trials: self.count,
            seed,
        }
    }
}

/// Runs `trials` evaluations of a sampler that fills one value per output
/// cell, returning a per-cell estimate. All cells of one trial share the
/// trial's substreams, which lets sweeps reuse expensive draws across
/// grid points.
pub fn estimate_grid<F>(
    cells: usize,
    trials: u64,
    seed: u64,
    sample: F,
) -> Result<Vec<McEstimate>, McError>
where
    F: Fn(&Substreams, &mut [f64]) + Sync,
{
    if trials < 2 {
        return Err(McError::TooFewTrials(trials));
    }
    if trials > MAX_TRIALS {
        return Err(McError::TooManyTrials(trials));
    }
    let n_chunks = trials.div_ceil(CHUNK_TRIALS);
    let chunk_stats: Vec<Vec<CellAcc>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK_TRIALS;
            let end = (start + CHUNK_TRIALS).min(trials);
            let mut accs = vec![CellAcc::new(); cells];
            let mut values = vec![0.0f64; cells];
            for trial in start..end {
                sample(&Substreams::new(seed, trial), &mut values);
                for (acc, &v) in accs.iter_mut().zip(values.iter()) {
                    acc.push(v);
                }
            }
            accs
        })
        .collect();

    let mut totals = vec![CellAcc::new(); cells];
    for chunk in chunk_stats {
        for (total, acc) in totals.iter_mut().zip(chunk) {
            *total = total.merge(acc);
        }
    }
    Ok(totals.into_iter().map(|acc| acc.into_estimate(seed)).collect())
}

/// Single-cell convenience wrapper around [`estimate_grid`].
pub fn estimate<F>(sample: F, trials: u64, seed: u64) -> Result<McEstimate, McError>
where
    F: Fn(&Substreams) -> f64 + Sync,
{
    let mut out = estimate_grid(1, trials, seed, |streams, values| {
        values[0] = sample(streams);
    })?;
    Ok(out.pop().expect("one cell requested"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_sampler_has_zero_ci() {
        let est = estimate(|_| 4.25, 1000, 9).unwrap();
        assert_eq!(est.mean, 4.25);
        assert_eq!(est.ci_half_width_95, 0.0);
        assert_eq!(est.trials, 1000);
        assert_eq!(est.seed, 9);
    }

    #[test]
    fn uniform_sampler_mean_near_half() {
        let est = estimate(|s| s.lane(0).gen::<f64>(), 1_000_000, 1).unwrap();
        assert!((est.mean - 0.5).abs() < 0.002, "mean {}", est.mean);
        assert!(est.ci_half_width_95 < 0.001);
    }

    #[test]
    fn rejects_degenerate_trial_counts() {
        assert_eq!(estimate(|_| 0.0, 1, 0).unwrap_err(), McError::TooFewTrials(1));
        assert_eq!(estimate(|_| 0.0, 0, 0).unwrap_err(), McError::TooFewTrials(0));
    }

    #[test]
    fn mean_is_bit_identical_across_worker_counts() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                estimate(|s| s.lane(0).gen::<f64>().ln_1p(), 50_000, 77).unwrap()
            })
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.mean.to_bits(), four.mean.to_bits());
        assert_eq!(one.ci_half_width_95.to_bits(), four.ci_half_width_95.to_bits());
    }

    #[test]
    fn streaming_variance_matches_two_pass() {
        let trials = 40_000u64;
        let seed = 5u64;
        let sample = |s: &Substreams| {
            let mut rng = s.lane(0);
            rng.gen::<f64>() * 3.0 + rng.gen::<f64>()
        };
        let est = estimate(sample, trials, seed).unwrap();

        let values: Vec<f64> = (0..trials)
            .map(|t| sample(&Substreams::new(seed, t)))
            .collect();
        let mean = values.iter().sum::<f64>() / trials as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
        let streaming_var = (est.ci_half_width_95 / 1.96).powi(2) * trials as f64;
        assert!(
            (streaming_var / var - 1.0).abs() < 1e-10,
            "streaming {streaming_var} vs two-pass {var}"
        );
        assert!((est.mean / mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn substreams_are_uncorrelated() {
        let n = 100_000;
        let draw = |trial: u64| -> Vec<f64> {
            let mut rng = Substreams::new(123, trial).lane(0);
            (0..n).map(|_| rng.gen::<f64>()).collect()
        };
        let a = draw(0);
        let b = draw(1);
        let ma = a.iter().sum::<f64>() / n as f64;
        let mb = b.iter().sum::<f64>() / n as f64;
        let mut cov = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for (x, y) in a.iter().zip(b.iter()) {
            cov += (x - ma) * (y - mb);
            va += (x - ma) * (x - ma);
            vb += (y - mb) * (y - mb);
        }
        let rho = cov / (va.sqrt() * vb.sqrt());
        assert!(rho.abs() < 0.01, "correlation {rho}");
    }

    #[test]
    fn lanes_are_distinct_streams() {
        let s = Substreams::new(42, 7);
        let a: f64 = s.lane(0).gen();
        let b: f64 = s.lane(1).gen();
        assert_ne!(a.to_bits(), b.to_bits());
        // same lane redraws identically
        let a2: f64 = s.lane(0).gen();
        assert_eq!(a.to_bits(), a2.to_bits());
    }

    #[test]
    fn grid_cells_match_independent_single_estimates() {
        // A grid sampler that exposes prefix sums must agree bitwise with
        // running each prefix as its own estimate on the same substreams.
        let grid_sample = |s: &Substreams, out: &mut [f64]| {
            let mut rng = s.lane(0);
            let mut acc = 0.0;
            for cell in out.iter_mut() {
                acc += rng.gen::<f64>();
                *cell = acc;
            }
        };
        let grid = estimate_grid(3, 5_000, 2024, grid_sample).unwrap();
        for (cell, grid_est) in grid.iter().enumerate() {
            let single = estimate(
                |s| {
                    let mut rng = s.lane(0);
                    (0..=cell).map(|_| rng.gen::<f64>()).sum::<f64>()
                },
                5_000,
                2024,
            )
            .unwrap();
            assert_eq!(single.mean.to_bits(), grid_est.mean.to_bits());
            assert_eq!(
                single.ci_half_width_95.to_bits(),
                grid_est.ci_half_width_95.to_bits()
            );
        }
    }
}
