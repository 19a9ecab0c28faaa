//! Time-domain simulation of an open-line flock driven by its leader.
//!
//! Positions are offsets from the formation: agent `k` sits at
//! `z_k - k * spacing`. Agent 0 follows a prescribed trajectory; the others
//! obey their coupled second-order dynamics, integrated with fixed-step RK4.

mod convoy;
mod instability;
mod integrator;
mod peaks;
mod scenario;
mod sweep;

use std::collections::BTreeMap;

use serde::Serialize;

pub use convoy::{convoy_scenario, run_convoy, ConvoyParams, ConvoyReport};
pub use instability::{
    block_flip_config, block_flip_growth, centered_block, envelope_growth_rate, BlockFlipRun,
};
pub use integrator::State;
pub use peaks::{detect_peaks, Peak};
pub use scenario::{default_dt, LeaderMotion, Scenario};
pub use sweep::{sweep_t1, SweepAggregate, SweepKind, SweepParam, SweepRow, SweepTable, SweepTemplate};

use crate::error::{FlockError, Result};
use crate::lattice::{Boundary, FlockConfig};
use crate::numeric::mean;
use crate::stability::spectral_radius_bound;
use integrator::Rk4;

/// Any state component beyond this magnitude counts as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Fewest peaks for which amplitude ratios are reported.
pub const MIN_PEAKS_FOR_RATIOS: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub dt: f64,
    /// Times of the recorded position snapshots.
    pub times: Vec<f64>,
    /// Offsets of every agent at each recorded time.
    pub positions: Vec<Vec<f64>>,
    /// `z_0 - z_{N-1}` at every step, starting at `t = 0`.
    pub leader_tail_gap: Vec<f64>,
    pub peaks: Vec<Peak>,
    /// Time of the first gap maximum.
    pub t1_measured: Option<f64>,
    /// `k -> A_{k+1} / A_k` (1-based), present once enough peaks are seen.
    pub amplitude_ratios: BTreeMap<usize, f64>,
    pub diverged: bool,
    pub diverged_at: Option<f64>,
    #[serde(skip)]
    pub final_state: State,
}

impl SimResult {
    pub fn gap_time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }
}

/// Integrates with no per-step observer.
pub fn integrate(
    config: &FlockConfig,
    scenario: &Scenario,
    initial: Option<&State>,
) -> Result<SimResult> {
    integrate_observed(config, scenario, initial, |_, _| {})
}

/// Integrates, calling `observer(t, state)` at `t = 0` and after every step.
pub fn integrate_observed<F: FnMut(f64, &State)>(
    config: &FlockConfig,
    scenario: &Scenario,
    initial: Option<&State>,
    mut observer: F,
) -> Result<SimResult> {
    config.validate()?;
    scenario.validate()?;
    if config.boundary != Boundary::OpenLine {
        return Err(FlockError::WrongBoundary {
            expected: "open_line",
        });
    }
    let n = config.n();
    let mut state = match initial {
        Some(s) if s.z.len() != n || s.v.len() != n => {
            return Err(FlockError::InvalidScenario(format!(
                "initial state has {} / {} entries for N = {n}",
                s.z.len(),
                s.v.len()
            )))
        }
        Some(s) => s.clone(),
        None => State::equilibrium(n),
    };
    let bound = spectral_radius_bound(config);
    if bound * scenario.dt > 2.5 {
        log::warn!(
            "dt = {} may be outside the RK4 stability region (|nu| bound {bound})",
            scenario.dt
        );
    }

    let steps = scenario.steps();
    let dt = scenario.dt;
    let mut rk = Rk4::new(config, scenario.kind.clone());
    rk.pin_leader(&mut state, 0.0);

    let gap = |s: &State| s.z[0] - s.z[n - 1];
    let mut times = vec![0.0];
    let mut positions = vec![state.z.clone()];
    let mut leader_tail_gap = Vec::with_capacity(steps + 1);
    leader_tail_gap.push(gap(&state));
    observer(0.0, &state);

    let mut diverged_at = None;
    for i in 0..steps {
        let t = i as f64 * dt;
        rk.step(&mut state, t, dt);
        let t_next = (i + 1) as f64 * dt;
        if state.max_abs() > DIVERGENCE_THRESHOLD {
            diverged_at = Some(t_next);
            break;
        }
        leader_tail_gap.push(gap(&state));
        if (i + 1) % scenario.record_stride == 0 {
            times.push(t_next);
            positions.push(state.z.clone());
        }
        observer(t_next, &state);
    }

    let peaks = detect_peaks(&leader_tail_gap, dt);
    let mut result = SimResult {
        dt,
        times,
        positions,
        leader_tail_gap,
        t1_measured: peaks.first().map(|p| p.t),
        peaks,
        amplitude_ratios: BTreeMap::new(),
        diverged: diverged_at.is_some(),
        diverged_at,
        final_state: state,
    };
    if let Ok(r) = measure_amplitudes(&result) {
        result.amplitude_ratios = r;
    }
    Ok(result)
}

/// Reference level of the gap for amplitude measurement: the mean over the
/// last full oscillation (between the final two peaks), or the mean of the
/// trailing 10% of the series when fewer than two peaks exist.
pub fn amplitude_baseline(result: &SimResult) -> f64 {
    let gap = &result.leader_tail_gap;
    if let [.., a, b] = result.peaks.as_slice() {
        let i0 = (a.t / result.dt).ceil() as usize;
        let i1 = ((b.t / result.dt).floor() as usize).min(gap.len() - 1);
        if i1 > i0 {
            return mean(&gap[i0..=i1]);
        }
    }
    let start = gap.len() - (gap.len() / 10).max(1);
    mean(&gap[start..])
}

/// Peak amplitudes `A_k = peak_k - baseline`.
pub fn peak_amplitudes(result: &SimResult) -> Vec<f64> {
    let base = amplitude_baseline(result);
    result.peaks.iter().map(|p| p.value - base).collect()
}

/// `k -> A_{k+1} / A_k` for all successive peaks (1-based `k`).
pub fn measure_amplitudes(result: &SimResult) -> Result<BTreeMap<usize, f64>> {
    if result.peaks.len() < MIN_PEAKS_FOR_RATIOS {
        return Err(FlockError::TooFewPeaks {
            found: result.peaks.len(),
            needed: MIN_PEAKS_FOR_RATIOS,
        });
    }
    let amps = peak_amplitudes(result);
    Ok(amps
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i + 1, w[1] / w[0]))
        .collect())
}
