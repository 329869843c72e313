//! Independent replications with a Student-t confidence interval.
//!
//! Replicate `r` (0-based) of a run with base seed `s` is seeded with the
//! `(r + 1)`-th output of SplitMix64 started at state `s`:
//!
//! ```text
//! state = s + (r + 1) * 0x9E3779B97F4A7C15        (wrapping)
//! z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! seed = z ^ (z >> 31)
//! ```
//!
//! That seed goes to `ChaCha8Rng::seed_from_u64` (rand_chacha 0.3).

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

use super::engine::{run_simulation, SimConfig, SimResult};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output number `index + 1` from state `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let state = base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// All replications, in replicate order. Runs in parallel; the result does
/// not depend on scheduling.
pub fn run_replicates(config: &SimConfig) -> Result<Vec<SimResult>> {
    config.validate()?;
    (0..u64::from(config.reps))
        .into_par_iter()
        .map(|r| run_simulation(config, derive_seed(config.base_seed, r)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary {
    pub mean: f64,
    /// Half-width of the 95% Student-t interval around `mean`.
    pub ci_halfwidth: f64,
    /// Sample standard deviation of the replicate values over `sqrt(R)`.
    pub std_error: f64,
    pub results: Vec<SimResult>,
}

impl ReplicateSummary {
    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.ci_halfwidth
    }
}

/// Mean, standard error and 95% half-width of a sample of at least two
/// values.
pub fn t_interval(values: &[f64]) -> Result<(f64, f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidConfig("a confidence interval needs at least two replications".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?
        .inverse_cdf(0.975);
    Ok((mean, se, t * se))
}

/// Runs the replications and summarizes their weighted-sum average age.
pub fn replicate(config: &SimConfig) -> Result<ReplicateSummary> {
    if config.reps < 2 {
        return Err(Error::InvalidConfig("a confidence interval needs at least two replications".into()));
    }
    let results = run_replicates(config)?;
    let values: Vec<f64> = results.iter().map(|r| r.ewsaoi).collect();
    let (mean, std_error, ci_halfwidth) = t_interval(&values)?;
    Ok(ReplicateSummary { mean, ci_halfwidth, std_error, results })
}
