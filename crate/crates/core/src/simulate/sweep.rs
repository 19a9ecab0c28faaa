//! Measured against predicted first-response time over families of flocks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{integrate, Scenario};
use crate::error::{FlockError, Result};
use crate::expansion::expand;
use crate::lattice::{build_config, Boundary, WeightDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Centre of the `g_x` distribution.
    MeanGx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Uniform,
    Ramp,
}

/// Everything but the swept value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub n: usize,
    pub kind: SweepKind,
    /// Width `hi - lo` of the `g_x` distribution, held fixed.
    pub gx_width: f64,
    pub gv: WeightDistribution,
    pub v_step: f64,
    /// Run length in units of the predicted first-response time.
    pub t_end_factor: f64,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
    pub t1_predicted: f64,
    pub t1_measured: Option<f64>,
    pub diverged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAggregate {
    pub value: f64,
    pub mean_measured: f64,
    pub std_measured: f64,
    pub mean_predicted: f64,
    pub std_predicted: f64,
    /// Mean of per-trial measured / predicted.
    pub mean_ratio: f64,
    pub completed: usize,
    pub diverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<SweepAggregate>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, var.sqrt())
}

/// Trial `t` of value index `i` uses seed `base_seed + i * trials + t`.
pub fn sweep_t1(
    template: &SweepTemplate,
    param: SweepParam,
    values: &[f64],
    trials: usize,
) -> Result<SweepTable> {
    let SweepParam::MeanGx = param;
    if trials == 0 {
        return Err(FlockError::InvalidConfig("trials must be at least 1".into()));
    }
    for &v in values {
        if !(v > 0.0 && v - template.gx_width / 2.0 > 0.0) {
            return Err(FlockError::InvalidConfig(format!(
                "mean g_x {v} must exceed half the width {}",
                template.gx_width / 2.0
            )));
        }
    }
    let jobs: Vec<(usize, f64, usize)> = values
        .iter()
        .enumerate()
        .flat_map(|(i, &v)| (0..trials).map(move |t| (i, v, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, value, trial)| {
            let (lo, hi) = (value - template.gx_width / 2.0, value + template.gx_width / 2.0);
            let gx = match template.kind {
                SweepKind::Uniform => WeightDistribution::Uniform { lo, hi },
                SweepKind::Ramp => WeightDistribution::Ramp { lo, hi },
            };
            let seed = template
                .base_seed
                .wrapping_add((i * trials + trial) as u64);
            let config = build_config(
                template.n,
                1,
                &gx,
                &template.gv,
                Boundary::OpenLine,
                0.0,
                seed,
            )?;
            let t1_predicted = expand(&config)?.t1;
            let scenario = Scenario::velocity_step(
                &config,
                template.v_step,
                template.t_end_factor * t1_predicted,
            )
            .with_stride(usize::MAX);
            let sim = integrate(&config, &scenario, None)?;
            Ok(SweepRow {
                value,
                trial,
                seed,
                t1_predicted,
                t1_measured: if sim.diverged { None } else { sim.t1_measured },
                diverged: sim.diverged,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let aggregates = values
        .iter()
        .map(|&value| {
            let group: Vec<&SweepRow> = rows.iter().filter(|r| r.value == value).collect();
            let ok: Vec<&&SweepRow> = group.iter().filter(|r| r.t1_measured.is_some()).collect();
            let measured: Vec<f64> = ok.iter().filter_map(|r| r.t1_measured).collect();
            let predicted: Vec<f64> = ok.iter().map(|r| r.t1_predicted).collect();
            let ratios: Vec<f64> = ok
                .iter()
                .map(|r| r.t1_measured.unwrap_or(f64::NAN) / r.t1_predicted)
                .collect();
            let (mean_measured, std_measured) = mean_std(&measured);
            let (mean_predicted, std_predicted) = mean_std(&predicted);
            SweepAggregate {
                value,
                mean_measured,
                std_measured,
                mean_predicted,
                std_predicted,
                mean_ratio: mean_std(&ratios).0,
                completed: ok.len(),
                diverged: group.iter().filter(|r| r.diverged).count(),
            }
        })
        .collect();
    Ok(SweepTable { rows, aggregates })
}
