use serde::{Deserialize, Serialize};

use crate::error::{FlockError, Result};
use crate::lattice::FlockConfig;

/// Prescribed motion of agent 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LeaderMotion {
    /// Leader at rest until `t = 0`, then moving at `v_step`.
    VelocityStep { v_step: f64 },
    /// Leader jumps by `dz` at `t = 0` and stays there.
    PositionStep { dz: f64 },
    /// Piecewise-linear samples; held constant outside the sampled range.
    Custom { times: Vec<f64>, positions: Vec<f64> },
}

impl LeaderMotion {
    /// Leader offset and velocity at time `t`.
    pub fn state(&self, t: f64) -> (f64, f64) {
        match self {
            LeaderMotion::VelocityStep { v_step } => (v_step * t, *v_step),
            LeaderMotion::PositionStep { dz } => (*dz, 0.0),
            LeaderMotion::Custom { times, positions } => {
                let last = times.len() - 1;
                if t < times[0] || last == 0 {
                    return (positions[0], 0.0);
                }
                if t >= times[last] {
                    return (positions[last], 0.0);
                }
                let i = times.partition_point(|&s| s <= t) - 1;
                let slope = (positions[i + 1] - positions[i]) / (times[i + 1] - times[i]);
                (positions[i] + slope * (t - times[i]), slope)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            LeaderMotion::VelocityStep { v_step } if !v_step.is_finite() => Err(
                FlockError::InvalidScenario("v_step must be finite".into()),
            ),
            LeaderMotion::PositionStep { dz } if !dz.is_finite() => {
                Err(FlockError::InvalidScenario("dz must be finite".into()))
            }
            LeaderMotion::Custom { times, positions } => {
                if times.is_empty() || times.len() != positions.len() {
                    return Err(FlockError::InvalidScenario(
                        "custom leader needs equal, non-empty times and positions".into(),
                    ));
                }
                #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails too
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(FlockError::InvalidScenario(
                        "custom leader times must be strictly increasing".into(),
                    ));
                }
                if times.iter().chain(positions).any(|x| !x.is_finite()) {
                    return Err(FlockError::InvalidScenario(
                        "custom leader samples must be finite".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: LeaderMotion,
    pub t_end: f64,
    pub dt: f64,
    /// Positions are recorded every `record_stride` steps.
    pub record_stride: usize,
}

impl Scenario {
    /// Velocity step with the default step size for `config`.
    pub fn velocity_step(config: &FlockConfig, v_step: f64, t_end: f64) -> Self {
        Scenario {
            kind: LeaderMotion::VelocityStep { v_step },
            t_end,
            dt: default_dt(config),
            record_stride: 1,
        }
    }

    pub fn with_stride(mut self, record_stride: usize) -> Self {
        self.record_stride = record_stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(FlockError::InvalidScenario(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(FlockError::InvalidScenario(format!(
                "t_end = {} must be finite and at least dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.record_stride == 0 {
            return Err(FlockError::InvalidScenario(
                "record_stride must be at least 1".into(),
            ));
        }
        self.kind.validate()
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// `0.1 / sqrt(max g_x (1 + max g_v))`.
pub fn default_dt(config: &FlockConfig) -> f64 {
    let gx = config.agents.iter().map(|a| a.g_x.abs()).fold(0.0, f64::max);
    let gv = config.agents.iter().map(|a| a.g_v.abs()).fold(0.0, f64::max);
    0.1 / (gx * (1.0 + gv)).sqrt().max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn custom_leader_interpolates_and_holds() {
        let m = LeaderMotion::Custom {
            times: vec![0.0, 1.0, 3.0],
            positions: vec![0.0, 2.0, 3.0],
        };
        assert_eq!(m.state(-1.0), (0.0, 0.0));
        assert_eq!(m.state(0.5), (1.0, 2.0));
        assert_eq!(m.state(2.0), (2.5, 0.5));
        assert_eq!(m.state(5.0), (3.0, 0.0));
    }

    #[test]
    fn rejects_bad_scenarios() {
        let ok = Scenario {
            kind: LeaderMotion::VelocityStep { v_step: 1.0 },
            t_end: 1.0,
            dt: 0.1,
            record_stride: 1,
        };
        assert!(ok.validate().is_ok());
        assert!(Scenario { dt: 0.0, ..ok.clone() }.validate().is_err());
        assert!(Scenario { t_end: 0.01, ..ok.clone() }.validate().is_err());
        assert!(Scenario { record_stride: 0, ..ok.clone() }.validate().is_err());
        let bad = LeaderMotion::Custom {
            times: vec![0.0, 0.0],
            positions: vec![1.0, 2.0],
        };
        assert!(Scenario { kind: bad, ..ok }.validate().is_err());
    }
}
