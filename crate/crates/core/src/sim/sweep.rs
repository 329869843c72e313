//! Coded versus uncoded comparison over a range of erasure probabilities
//! on a symmetric channel with `eps12 = scale * eps^2`.
//!
//! Each row holds the lower bound, the optimal coded and uncoded randomized
//! values (closed form), coded and uncoded Max-Weight (simulated, mean and
//! 95% half-width) and the smallest Max-Weight upper bound.
//!
//! The two Max-Weight runs at point `j` use base seeds
//! `derive_seed(seed, 2 j)` and `derive_seed(seed, 2 j + 1)`.

use std::io::Write;

use rayon::prelude::*;

use crate::analysis::{lower_bound, min_mw_upper_bound, optimize_randomized, optimize_uncoded};
use crate::aoi::AgeWeights;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::policy::Policy;

use super::engine::SimConfig;
use super::replicate::{derive_seed, replicate};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alphas: AgeWeights,
    pub epsilons: Vec<f64>,
    pub eps12_scale: f64,
    pub horizon: u64,
    pub reps: u32,
    pub seed: u64,
    /// Optimizer tolerance.
    pub tolerance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            alphas: AgeWeights::new(0.3, 0.7).expect("valid weights"),
            epsilons: eps_grid(0.10, 0.95, 0.05).expect("valid grid"),
            eps12_scale: 0.2,
            horizon: 1_000_000,
            reps: 20,
            seed: 2021,
            tolerance: 1e-6,
        }
    }
}

/// `start, start + step, ...` up to `stop`. Each point is computed from its
/// index and rounded to 6 decimals, so 0.8 is exactly `0.8`.
pub fn eps_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(start >= 0.0) || !(stop < 1.0) || stop < start {
        return Err(Error::InvalidConfig(format!("bad grid {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as u64;
    Ok((0..=n).map(|j| (start * 1e6 + (j as f64) * step * 1e6).round() / 1e6).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub eps12: f64,
    pub lower_bound: f64,
    pub coded_rand: f64,
    pub uncoded_rand: f64,
    pub coded_mw_mean: f64,
    pub coded_mw_ci: f64,
    pub uncoded_mw_mean: f64,
    pub uncoded_mw_ci: f64,
    pub mw_bound: f64,
}

pub const CSV_HEADER: &str = "epsilon,eps12,lower_bound,coded_rand,uncoded_rand,coded_mw_mean,coded_mw_ci,uncoded_mw_mean,uncoded_mw_ci,mw_bound";

impl SweepRow {
    pub fn values(&self) -> [f64; 10] {
        [
            self.epsilon,
            self.eps12,
            self.lower_bound,
            self.coded_rand,
            self.uncoded_rand,
            self.coded_mw_mean,
            self.coded_mw_ci,
            self.uncoded_mw_mean,
            self.uncoded_mw_ci,
            self.mw_bound,
        ]
    }
}

fn sweep_point(cfg: &SweepConfig, index: usize, eps: f64) -> Result<SweepRow> {
    let eps12 = cfg.eps12_scale * eps * eps;
    let params = ChannelParams::symmetric(eps, eps12)?;
    let a = &cfg.alphas;
    let mw = |coded: bool, stream: u64| {
        let sim = SimConfig::new(Policy::MaxWeight { coded }, params, *a)
            .with_horizon(cfg.horizon)
            .with_reps(cfg.reps)
            .with_seed(derive_seed(cfg.seed, stream));
        replicate(&sim)
    };
    let coded = mw(true, 2 * index as u64)?;
    let uncoded = mw(false, 2 * index as u64 + 1)?;
    Ok(SweepRow {
        epsilon: eps,
        eps12,
        lower_bound: lower_bound(a, &params),
        coded_rand: optimize_randomized(a, &params, cfg.tolerance)?.value,
        uncoded_rand: optimize_uncoded(a, &params, cfg.tolerance)?.value,
        coded_mw_mean: coded.mean,
        coded_mw_ci: coded.ci_halfwidth,
        uncoded_mw_mean: uncoded.mean,
        uncoded_mw_ci: uncoded.ci_halfwidth,
        mw_bound: min_mw_upper_bound(a, &params, cfg.tolerance)?.value,
    })
}

/// One row per epsilon, in input order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.epsilons.is_empty() {
        return Err(Error::InvalidConfig("empty epsilon grid".into()));
    }
    cfg.epsilons.par_iter().enumerate().map(|(j, &e)| sweep_point(cfg, j, e)).collect()
}

/// Full precision: 17 significant digits per value.
pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let cells: Vec<String> = row.values().iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Aligned, whitespace-separated table rounded to 4 decimals.
pub fn write_report<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    let names: Vec<&str> = CSV_HEADER.split(',').collect();
    writeln!(out, "{}", names.iter().map(|n| format!("{n:>15}")).collect::<String>())?;
    for row in rows {
        writeln!(out, "{}", row.values().iter().map(|v| format!("{v:>15.4}")).collect::<String>())?;
    }
    Ok(())
}
