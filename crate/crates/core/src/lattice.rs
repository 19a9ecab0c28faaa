//! Flock configurations and the exact system matrices they induce.
//!
//! A flock is a chain of `N = p * q` agents. The `p` agent types are distinct;
//! with [`Boundary::Periodic`] the type sequence is repeated `q` times around a
//! ring, with [`Boundary::OpenLine`] (`q = 1`) agent 0 is an externally driven
//! leader and agent `N - 1` is a free tail.
//!
//! Agent `k` obeys
//!
//! ```text
//! z''_k = -g_x (z_k + rho_x+ z_{k+1} + rho_x- z_{k-1})
//!         -g_v (z'_k + rho_v+ z'_{k+1} + rho_v- z'_{k-1})
//! ```
//!
//! in offset coordinates (the target spacing `k * spacing` already removed).

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FlockError, Result};

/// Largest `N` for which dense `2N x 2N` matrices are materialised by default.
pub const DEFAULT_DENSE_CAP: usize = 2000;

/// Per-agent couplings. `rho_*_plus` multiplies the neighbour ahead in index
/// (`k + 1`), `rho_*_minus` the neighbour behind (`k - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentCoupling {
    pub rho_x_plus: f64,
    pub rho_x_minus: f64,
    pub rho_v_plus: f64,
    pub rho_v_minus: f64,
    pub g_x: f64,
    pub g_v: f64,
}

impl AgentCoupling {
    /// Symmetric Laplacian couplings (all rho = -1/2) with the given weights.
    pub fn symmetric(g_x: f64, g_v: f64) -> Self {
        AgentCoupling {
            rho_x_plus: -0.5,
            rho_x_minus: -0.5,
            rho_v_plus: -0.5,
            rho_v_minus: -0.5,
            g_x,
            g_v,
        }
    }

    pub fn has_symmetric_rho(&self) -> bool {
        self.rho_x_plus == -0.5
            && self.rho_x_minus == -0.5
            && self.rho_v_plus == -0.5
            && self.rho_v_minus == -0.5
    }

    /// `rho_- + 1 + rho_+` for the position and velocity couplings.
    pub fn row_sums(&self) -> (f64, f64) {
        (
            self.rho_x_minus + 1.0 + self.rho_x_plus,
            self.rho_v_minus + 1.0 + self.rho_v_plus,
        )
    }

    pub fn get(&self, field: CouplingField) -> f64 {
        match field {
            CouplingField::GX => self.g_x,
            CouplingField::GV => self.g_v,
            CouplingField::RhoXPlus => self.rho_x_plus,
            CouplingField::RhoXMinus => self.rho_x_minus,
            CouplingField::RhoVPlus => self.rho_v_plus,
            CouplingField::RhoVMinus => self.rho_v_minus,
        }
    }

    fn set(&mut self, field: CouplingField, value: f64) {
        match field {
            CouplingField::GX => self.g_x = value,
            CouplingField::GV => self.g_v = value,
            CouplingField::RhoXPlus => self.rho_x_plus = value,
            CouplingField::RhoXMinus => self.rho_x_minus = value,
            CouplingField::RhoVPlus => self.rho_v_plus = value,
            CouplingField::RhoVMinus => self.rho_v_minus = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingField {
    #[serde(rename = "g_x")]
    GX,
    #[serde(rename = "g_v")]
    GV,
    RhoXPlus,
    RhoXMinus,
    RhoVPlus,
    RhoVMinus,
}

impl CouplingField {
    /// The field whose value must absorb a change to keep the row sum zero.
    pub fn partner(self) -> Option<CouplingField> {
        match self {
            CouplingField::RhoXPlus => Some(CouplingField::RhoXMinus),
            CouplingField::RhoXMinus => Some(CouplingField::RhoXPlus),
            CouplingField::RhoVPlus => Some(CouplingField::RhoVMinus),
            CouplingField::RhoVMinus => Some(CouplingField::RhoVPlus),
            CouplingField::GX | CouplingField::GV => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    OpenLine,
}

/// How per-agent weights are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightDistribution {
    Constant {
        value: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `lo + alpha (hi - lo) / (p - 1)` for `alpha = 0..p`.
    Ramp {
        lo: f64,
        hi: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
    /// Trucks with uniform weights, a fixed fraction of which are replaced by
    /// cars with their own uniform range at random positions.
    ConvoyMixture {
        truck_lo: f64,
        truck_hi: f64,
        car_lo: f64,
        car_hi: f64,
        car_fraction: f64,
    },
}

impl WeightDistribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FlockError::InvalidDistribution(msg));
        let check_range = |lo: f64, hi: f64, name: &str| -> Result<()> {
            if !lo.is_finite() || !hi.is_finite() {
                return bad(format!("{name}: bounds must be finite"));
            }
            if lo > hi {
                return bad(format!("{name}: lo = {lo} exceeds hi = {hi}"));
            }
            Ok(())
        };
        match self {
            WeightDistribution::Constant { value } if !value.is_finite() => {
                bad("constant value must be finite".into())
            }
            WeightDistribution::Constant { .. } => Ok(()),
            WeightDistribution::Uniform { lo, hi } => check_range(*lo, *hi, "uniform"),
            WeightDistribution::Ramp { lo, hi } => check_range(*lo, *hi, "ramp"),
            WeightDistribution::Explicit { values } => {
                if values.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    bad("explicit values must be finite".into())
                }
            }
            WeightDistribution::ConvoyMixture {
                truck_lo,
                truck_hi,
                car_lo,
                car_hi,
                car_fraction,
            } => {
                check_range(*truck_lo, *truck_hi, "trucks")?;
                check_range(*car_lo, *car_hi, "cars")?;
                if !(0.0..=1.0).contains(car_fraction) {
                    return bad(format!("car fraction {car_fraction} outside [0, 1]"));
                }
                Ok(())
            }
        }
    }

    /// Draws `p` weights. Deterministic given the state of `rng`.
    pub fn sample<R: Rng>(&self, p: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.validate()?;
        let uniform = |rng: &mut R, lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
        let values = match self {
            WeightDistribution::Constant { value } => vec![*value; p],
            WeightDistribution::Uniform { lo, hi } => {
                (0..p).map(|_| uniform(rng, *lo, *hi)).collect()
            }
            WeightDistribution::Ramp { lo, hi } => {
                if p == 1 {
                    vec![*lo]
                } else {
                    let step = (hi - lo) / (p - 1) as f64;
                    (0..p).map(|a| lo + a as f64 * step).collect()
                }
            }
            WeightDistribution::Explicit { values } => {
                if values.len() != p {
                    return Err(FlockError::InvalidDistribution(format!(
                        "explicit distribution has {} values, expected {p}",
                        values.len()
                    )));
                }
                values.clone()
            }
            WeightDistribution::ConvoyMixture {
                truck_lo,
                truck_hi,
                car_lo,
                car_hi,
                car_fraction,
            } => {
                let mut values: Vec<f64> =
                    (0..p).map(|_| uniform(rng, *truck_lo, *truck_hi)).collect();
                let n_cars = (car_fraction * p as f64).round() as usize;
                let mut cars = sample(rng, p, n_cars.min(p)).into_vec();
                cars.sort_unstable();
                for k in cars {
                    values[k] = uniform(rng, *car_lo, *car_hi);
                }
                values
            }
        };
        Ok(values)
    }
}

/// A single field override applied after weights are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub index: usize,
    pub field: CouplingField,
    pub value: f64,
    /// When true (the default) a rho override also moves its partner so the
    /// row still sums to zero.
    #[serde(default = "default_true")]
    pub preserve_row_sum: bool,
}

fn default_true() -> bool {
    true
}

/// Full description of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlockConfig {
    pub p: usize,
    pub q: usize,
    pub agents: Vec<AgentCoupling>,
    pub boundary: Boundary,
    pub spacing: f64,
    pub seed: u64,
}

impl FlockConfig {
    /// Builds a config from explicit agents; checks the structural invariants.
    pub fn from_agents(
        agents: Vec<AgentCoupling>,
        q: usize,
        boundary: Boundary,
        spacing: f64,
        seed: u64,
    ) -> Result<Self> {
        let config = FlockConfig {
            p: agents.len(),
            q,
            agents,
            boundary,
            spacing,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.q == 0 {
            return Err(FlockError::InvalidConfig("p and q must be at least 1".into()));
        }
        if self.agents.len() != self.p {
            return Err(FlockError::InvalidConfig(format!(
                "{} agents given for p = {}",
                self.agents.len(),
                self.p
            )));
        }
        if self.boundary == Boundary::OpenLine && self.q != 1 {
            return Err(FlockError::InvalidConfig(format!(
                "open-line flocks require q = 1, got q = {}",
                self.q
            )));
        }
        if !(self.spacing >= 0.0 && self.spacing.is_finite()) {
            return Err(FlockError::InvalidConfig(format!(
                "spacing must be a finite non-negative number, got {}",
                self.spacing
            )));
        }
        Ok(())
    }

    /// Total number of agents `N = p q`.
    pub fn n(&self) -> usize {
        self.p * self.q
    }

    /// Coupling of agent `k` in chain order.
    pub fn agent(&self, k: usize) -> &AgentCoupling {
        &self.agents[k % self.p]
    }

    pub fn g_x(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.g_x).collect()
    }

    pub fn g_v(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.g_v).collect()
    }

    /// All rho equal to -1/2.
    pub fn has_symmetric_rho(&self) -> bool {
        self.agents.iter().all(AgentCoupling::has_symmetric_rho)
    }

    /// Sets `g_v = alpha * g_x` for every agent.
    pub fn with_proportional_damping(mut self, alpha: f64) -> Self {
        for a in &mut self.agents {
            a.g_v = alpha * a.g_x;
        }
        self
    }

    /// Returns a copy with one field of agent type `index` overridden. A rho
    /// override moves its partner so the row sum stays zero.
    pub fn perturbed(&self, index: usize, field: CouplingField, value: f64) -> Result<Self> {
        self.apply(&Perturbation {
            index,
            field,
            value,
            preserve_row_sum: true,
        })
    }

    /// Like [`FlockConfig::perturbed`] but leaves the partner rho untouched.
    pub fn perturbed_unbalanced(
        &self,
        index: usize,
        field: CouplingField,
        value: f64,
    ) -> Result<Self> {
        self.apply(&Perturbation {
            index,
            field,
            value,
            preserve_row_sum: false,
        })
    }

    pub fn apply(&self, perturbation: &Perturbation) -> Result<Self> {
        let Perturbation {
            index,
            field,
            value,
            preserve_row_sum,
        } = *perturbation;
        if index >= self.p {
            return Err(FlockError::IndexOutOfRange { index, p: self.p });
        }
        let mut next = self.clone();
        let agent = &mut next.agents[index];
        agent.set(field, value);
        if preserve_row_sum {
            if let Some(partner) = field.partner() {
                agent.set(partner, -1.0 - value);
            }
        }
        Ok(next)
    }

    /// Absolute positions for rendering: leader ahead, agent `k` at
    /// `offset_k - k * spacing`.
    pub fn absolute_positions(&self, offsets: &[f64]) -> Vec<f64> {
        offsets
            .iter()
            .enumerate()
            .map(|(k, z)| z - k as f64 * self.spacing)
            .collect()
    }
}

/// Draws a flock with all rho = -1/2 and weights from the given distributions.
/// `g_x` is drawn before `g_v` from one seeded stream.
pub fn build_config(
    p: usize,
    q: usize,
    gx_dist: &WeightDistribution,
    gv_dist: &WeightDistribution,
    boundary: Boundary,
    spacing: f64,
    seed: u64,
) -> Result<FlockConfig> {
    if p == 0 || q == 0 {
        return Err(FlockError::InvalidConfig("p and q must be at least 1".into()));
    }
    if boundary == Boundary::OpenLine && q != 1 {
        return Err(FlockError::InvalidConfig(format!(
            "open-line flocks require q = 1, got q = {q}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gx = gx_dist.sample(p, &mut rng)?;
    let gv = gv_dist.sample(p, &mut rng)?;
    let agents = gx
        .into_iter()
        .zip(gv)
        .map(|(g_x, g_v)| AgentCoupling::symmetric(g_x, g_v))
        .collect();
    FlockConfig::from_agents(agents, q, boundary, spacing, seed)
}

/// Free-function form of [`FlockConfig::perturbed`].
pub fn perturb_agent(
    config: &FlockConfig,
    index: usize,
    field: CouplingField,
    value: f64,
) -> Result<FlockConfig> {
    config.perturbed(index, field, value)
}

/// Dense matrices of the linear system `d/dt (z, z') = A (z, z')`.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub l_x: DMatrix<f64>,
    pub l_v: DMatrix<f64>,
    /// Diagonal of `G_x`.
    pub g_x: DVector<f64>,
    /// Diagonal of `G_v`.
    pub g_v: DVector<f64>,
    /// `[[0, I], [G_x L_x, G_v L_v]]`.
    pub a: DMatrix<f64>,
}

impl SystemMatrices {
    pub fn n(&self) -> usize {
        self.l_x.nrows()
    }

    pub fn g_x_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.g_x)
    }

    pub fn g_v_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.g_v)
    }

    /// Largest `|row sum|` over both Laplacians.
    pub fn max_row_sum(&self) -> f64 {
        [&self.l_x, &self.l_v]
            .iter()
            .flat_map(|m| m.row_iter().map(|r| r.sum().abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }
}

/// Assembles the dense system matrices with the default size cap.
pub fn assemble(config: &FlockConfig) -> Result<SystemMatrices> {
    assemble_with_cap(config, DEFAULT_DENSE_CAP)
}

pub fn assemble_with_cap(config: &FlockConfig, cap: usize) -> Result<SystemMatrices> {
    config.validate()?;
    let n = config.n();
    if n > cap {
        return Err(FlockError::TooLarge { n, cap });
    }
    let mut l_x = DMatrix::zeros(n, n);
    let mut l_v = DMatrix::zeros(n, n);
    match config.boundary {
        Boundary::Periodic => {
            for k in 0..n {
                let a = config.agent(k);
                let ahead = (k + 1) % n;
                let behind = (k + n - 1) % n;
                l_x[(k, k)] += -1.0;
                l_x[(k, ahead)] += -a.rho_x_plus;
                l_x[(k, behind)] += -a.rho_x_minus;
                l_v[(k, k)] += -1.0;
                l_v[(k, ahead)] += -a.rho_v_plus;
                l_v[(k, behind)] += -a.rho_v_minus;
            }
        }
        Boundary::OpenLine => {
            // Row 0 (leader) stays zero.
            for k in 1..n.saturating_sub(1) {
                let a = config.agent(k);
                l_x[(k, k)] = -1.0;
                l_x[(k, k + 1)] = -a.rho_x_plus;
                l_x[(k, k - 1)] = -a.rho_x_minus;
                l_v[(k, k)] = -1.0;
                l_v[(k, k + 1)] = -a.rho_v_plus;
                l_v[(k, k - 1)] = -a.rho_v_minus;
            }
            if n >= 2 {
                let tail = n - 1;
                l_x[(tail, tail)] = -1.0;
                l_x[(tail, tail - 1)] = 1.0;
                l_v[(tail, tail)] = -1.0;
                l_v[(tail, tail - 1)] = 1.0;
            }
        }
    }
    let g_x = DVector::from_iterator(n, (0..n).map(|k| config.agent(k).g_x));
    let g_v = DVector::from_iterator(n, (0..n).map(|k| config.agent(k).g_v));

    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        a[(i, n + i)] = 1.0;
        for j in 0..n {
            a[(n + i, j)] = g_x[i] * l_x[(i, j)];
            a[(n + i, n + j)] = g_v[i] * l_v[(i, j)];
        }
    }
    Ok(SystemMatrices {
        l_x,
        l_v,
        g_x,
        g_v,
        a,
    })
}
