//! A road convoy of slow trucks with a sprinkling of faster cars.

use serde::{Deserialize, Serialize};

use super::{integrate, Scenario};
use crate::error::Result;
use crate::expansion::expand;
use crate::lattice::{build_config, Boundary, FlockConfig, WeightDistribution};

/// 60 mph in m/s.
const SIXTY_MPH: f64 = 26.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvoyParams {
    pub n: usize,
    pub car_fraction: f64,
    /// `g_v = alpha g_x`.
    pub alpha: f64,
    /// Metres between vehicles at rest.
    pub spacing: f64,
    /// Leader speed increase, m/s.
    pub v_step: f64,
    /// Run length in units of the predicted first-response time.
    pub t_end_factor: f64,
    pub seed: u64,
}

impl Default for ConvoyParams {
    fn default() -> Self {
        ConvoyParams {
            n: 400,
            car_fraction: 0.10,
            alpha: 10.0,
            spacing: 69.0,
            v_step: 10.0,
            t_end_factor: 3.5,
            seed: 0,
        }
    }
}

/// Weights from 0-to-60 mph times: trucks 60-300 s, cars 6-20 s.
pub fn convoy_scenario(params: &ConvoyParams) -> Result<(FlockConfig, Scenario)> {
    let gx = WeightDistribution::ConvoyMixture {
        truck_lo: SIXTY_MPH / 300.0,
        truck_hi: SIXTY_MPH / 60.0,
        car_lo: SIXTY_MPH / 20.0,
        car_hi: SIXTY_MPH / 6.0,
        car_fraction: params.car_fraction,
    };
    let config = build_config(
        params.n,
        1,
        &gx,
        &WeightDistribution::Constant { value: 0.0 },
        Boundary::OpenLine,
        params.spacing,
        params.seed,
    )?
    .with_proportional_damping(params.alpha);
    let t1 = expand(&config)?.t1;
    let mut scenario = Scenario::velocity_step(&config, params.v_step, params.t_end_factor * t1);
    scenario.record_stride = ((10.0 / scenario.dt).round() as usize).max(1);
    Ok((config, scenario))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvoyReport {
    pub seed: u64,
    pub t1_predicted: f64,
    /// First maximum of the leader–tail gap.
    pub tail_arrival_time: Option<f64>,
    /// Leader-to-tail length at that maximum, metres.
    pub max_length: Option<f64>,
    /// Shortest length after the maximum, metres.
    pub min_length: Option<f64>,
    pub diverged: bool,
}

pub fn run_convoy(params: &ConvoyParams) -> Result<(ConvoyReport, super::SimResult)> {
    let (config, scenario) = convoy_scenario(params)?;
    let t1_predicted = expand(&config)?.t1;
    let sim = integrate(&config, &scenario, None)?;
    let rest_length = (config.n() - 1) as f64 * config.spacing;
    let first = sim.peaks.first().copied();
    let min_length = first.and_then(|p| {
        let start = (p.t / sim.dt).ceil() as usize;
        sim.leader_tail_gap
            .get(start..)
            .and_then(|tail| tail.iter().copied().reduce(f64::min))
            .map(|g| g + rest_length)
    });
    Ok((
        ConvoyReport {
            seed: params.seed,
            t1_predicted,
            tail_arrival_time: first.map(|p| p.t),
            max_length: first.map(|p| p.value + rest_length),
            min_length,
            diverged: sim.diverged,
        },
        sim,
    ))
}
