//! Growth of a disturbance seeded by flipping the forward position coupling
//! on a block of agents in the middle of the chain.

use std::ops::Range;

use serde::Serialize;

use super::{integrate_observed, Scenario};
use crate::error::Result;
use crate::lattice::{CouplingField, FlockConfig};

/// The `len` agents centred on `n / 2`.
pub fn centered_block(n: usize, len: usize) -> Range<usize> {
    let start = (n / 2).saturating_sub(len / 2);
    start..(start + len).min(n)
}

/// `base` with `rho_x+ = rho_x_plus` (partner adjusted) on the centred block.
pub fn block_flip_config(base: &FlockConfig, len: usize, rho_x_plus: f64) -> Result<FlockConfig> {
    let mut config = base.clone();
    for k in centered_block(base.n(), len) {
        config = config.perturbed(k, CouplingField::RhoXPlus, rho_x_plus)?;
    }
    Ok(config)
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockFlipRun {
    pub block_len: usize,
    /// Exponential rate of the mid-agent deviation from the unflipped run;
    /// `-inf` when the deviation is identically zero.
    pub growth_rate: f64,
    pub max_deviation: f64,
    pub diverged: bool,
    pub diverged_at: Option<f64>,
}

/// Least-squares slope of `ln max|d|` over consecutive windows of
/// `window` samples of `series` (sample spacing `dt`). Windows whose maximum
/// is zero are skipped; fewer than two usable windows gives `-inf`.
pub fn envelope_growth_rate(series: &[f64], dt: f64, window: usize) -> f64 {
    let window = window.max(1);
    let pts: Vec<(f64, f64)> = series
        .chunks(window)
        .enumerate()
        .filter_map(|(i, c)| {
            let m = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            (m > 0.0).then(|| ((i as f64 + 0.5) * window as f64 * dt, m.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return f64::NEG_INFINITY;
    }
    let n = pts.len() as f64;
    let (mt, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, y)| (a + t / n, b + y / n));
    let (sty, stt) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| {
        (a + (t - mt) * (y - my), b + (t - mt) * (t - mt))
    });
    sty / stt
}

fn mid_trajectory(config: &FlockConfig, scenario: &Scenario) -> Result<(Vec<f64>, Option<f64>)> {
    let mid = config.n() / 2;
    let mut series = Vec::with_capacity(scenario.steps() + 1);
    let sim = integrate_observed(config, scenario, None, |_, s| series.push(s.z[mid]))?;
    Ok((series, sim.diverged_at))
}

/// Runs the unflipped chain and one chain per block length, measuring how
/// fast the mid agent departs from the unflipped trajectory.
///
/// The rate is fitted over the second half of the run, cut at the divergence
/// time when there is one, using 20 envelope windows.
pub fn block_flip_growth(
    base: &FlockConfig,
    lengths: &[usize],
    rho_x_plus: f64,
    scenario: &Scenario,
) -> Result<Vec<BlockFlipRun>> {
    use rayon::prelude::*;
    let (reference, _) = mid_trajectory(base, scenario)?;
    lengths
        .par_iter()
        .map(|&len| {
            let config = block_flip_config(base, len, rho_x_plus)?;
            let (series, diverged_at) = mid_trajectory(&config, scenario)?;
            let deviation: Vec<f64> = series
                .iter()
                .zip(&reference)
                .map(|(a, b)| a - b)
                .collect();
            let tail = &deviation[deviation.len() / 2..];
            let rate = envelope_growth_rate(tail, scenario.dt, tail.len() / 20);
            Ok(BlockFlipRun {
                block_len: len,
                growth_rate: rate,
                max_deviation: deviation.iter().fold(0.0, |m, x| m.max(x.abs())),
                diverged: diverged_at.is_some(),
                diverged_at,
            })
        })
        .collect()
}
