//! The on-disk run description.
//!
//! TOML is the authoring format; JSON is accepted too so that the
//! `config_echo` of a manifest can be fed straight back in.
//!
//! ```toml
//! p = 200
//! boundary = "open_line"
//! seed = 3
//! gx = { kind = "uniform", lo = 0.5, hi = 10.5 }
//! gv = { kind = "uniform", lo = 0.5, hi = 1.5 }
//! perturbations = [{ index = 100, field = "g_x", value = -0.5 }]
//!
//! [scenario]
//! t_end_factor = 2.0
//! leader = { kind = "velocity_step", v_step = 1.0 }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::expansion::expand;
use crate::lattice::{
    build_config, AgentCoupling, Boundary, FlockConfig, Perturbation, WeightDistribution,
};
use crate::simulate::{default_dt, LeaderMotion, Scenario, SweepKind, SweepTemplate};

/// Target number of trajectory rows when `record_stride` is not given.
const DEFAULT_TRAJECTORY_ROWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub p: usize,
    #[serde(default = "one")]
    pub q: usize,
    #[serde(default = "open_line")]
    pub boundary: Boundary,
    #[serde(default)]
    pub spacing: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gx: Option<WeightDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gv: Option<WeightDistribution>,
    /// Explicit agents; takes the place of `gx` / `gv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<Vec<AgentCoupling>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub perturbations: Vec<Perturbation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default = "unit_velocity_step")]
    pub leader: LeaderMotion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Run length in predicted first-response times; used when `t_end` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            leader: unit_velocity_step(),
            t_end: None,
            t_end_factor: None,
            dt: None,
            record_stride: None,
        }
    }
}

/// Sweep settings; `n` is `p` and the velocity gains come from `gv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "uniform_kind")]
    pub kind: SweepKind,
    pub gx_width: f64,
    #[serde(default = "unit")]
    pub v_step: f64,
    #[serde(default = "two")]
    pub t_end_factor: f64,
}

fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn open_line() -> Boundary {
    Boundary::OpenLine
}
fn uniform_kind() -> SweepKind {
    SweepKind::Uniform
}
fn unit_velocity_step() -> LeaderMotion {
    LeaderMotion::VelocityStep { v_step: 1.0 }
}

impl ConfigFile {
    /// Reads TOML, or JSON when the extension is `.json`. Parse errors carry
    /// the line and the offending field.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|message| CliError::Config {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn parse_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: "<inline>".into(),
            message: e.to_string(),
        })
    }

    /// Draws (or takes) the agents and applies the perturbations in order.
    pub fn flock(&self, seed_override: Option<u64>) -> Result<FlockConfig, CliError> {
        let seed = seed_override.unwrap_or(self.seed);
        let mut config = match (&self.agents, &self.gx, &self.gv) {
            (Some(agents), None, None) => {
                if agents.len() != self.p {
                    return Err(self.invalid(format!(
                        "agents has {} entries but p = {}",
                        agents.len(),
                        self.p
                    )));
                }
                FlockConfig::from_agents(agents.clone(), self.q, self.boundary, self.spacing, seed)?
            }
            (None, Some(gx), Some(gv)) => {
                build_config(self.p, self.q, gx, gv, self.boundary, self.spacing, seed)?
            }
            (Some(_), _, _) => {
                return Err(self.invalid("give either `agents` or `gx` and `gv`, not both".into()))
            }
            (None, None, _) => return Err(self.invalid("missing field `gx`".into())),
            (None, _, None) => return Err(self.invalid("missing field `gv`".into())),
        };
        for (i, perturbation) in self.perturbations.iter().enumerate() {
            config = config.apply(perturbation).map_err(|e| {
                self.invalid(format!("perturbations[{i}]: {e}"))
            })?;
        }
        Ok(config)
    }

    /// The scenario with every optional field filled in for `config`.
    pub fn resolved_scenario(&self, config: &FlockConfig) -> Result<ScenarioSpec, CliError> {
        let spec = self.scenario.clone().unwrap_or_default();
        let t_end = match (spec.t_end, spec.t_end_factor) {
            (Some(t), _) => t,
            (None, factor) => {
                let t1 = expand(config).map_err(|e| {
                    self.invalid(format!(
                        "scenario.t_end is required when T1 cannot be predicted ({e})"
                    ))
                })?;
                factor.unwrap_or(2.0) * t1.t1
            }
        };
        let dt = spec.dt.unwrap_or_else(|| default_dt(config));
        let steps = (t_end / dt).round() as usize;
        let record_stride = spec
            .record_stride
            .unwrap_or_else(|| steps.div_ceil(DEFAULT_TRAJECTORY_ROWS).max(1));
        Ok(ScenarioSpec {
            leader: spec.leader,
            t_end: Some(t_end),
            t_end_factor: None,
            dt: Some(dt),
            record_stride: Some(record_stride),
        })
    }

    pub fn sweep_template(&self, seed_override: Option<u64>) -> Result<SweepTemplate, CliError> {
        let spec = self
            .sweep
            .as_ref()
            .ok_or_else(|| self.invalid("missing table `sweep`".into()))?;
        let gv = self
            .gv
            .clone()
            .ok_or_else(|| self.invalid("missing field `gv`".into()))?;
        Ok(SweepTemplate {
            n: self.p,
            kind: spec.kind,
            gx_width: spec.gx_width,
            gv,
            v_step: spec.v_step,
            t_end_factor: spec.t_end_factor,
            base_seed: seed_override.unwrap_or(self.seed),
        })
    }

    /// A self-contained description of `config`: explicit agents, no
    /// perturbations left to apply, and a fully resolved scenario.
    pub fn echo(&self, config: &FlockConfig, scenario: Option<ScenarioSpec>) -> ConfigFile {
        ConfigFile {
            p: config.p,
            q: config.q,
            boundary: config.boundary,
            spacing: config.spacing,
            seed: config.seed,
            gx: None,
            gv: None,
            agents: Some(config.agents.clone()),
            perturbations: Vec::new(),
            scenario,
            sweep: self.sweep.clone(),
        }
    }

    fn invalid(&self, message: String) -> CliError {
        CliError::Config {
            path: "<config>".into(),
            message,
        }
    }
}

impl ScenarioSpec {
    /// Requires a resolved spec.
    pub fn to_scenario(&self) -> Scenario {
        Scenario {
            kind: self.leader.clone(),
            t_end: self.t_end.expect("resolved scenario"),
            dt: self.dt.expect("resolved scenario"),
            record_stride: self.record_stride.expect("resolved scenario"),
        }
    }
}
