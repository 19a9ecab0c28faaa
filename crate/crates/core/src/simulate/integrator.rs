//! Classical RK4 on the open-line chain, working directly on per-agent
//! coupling records.

use crate::lattice::FlockConfig;

use super::scenario::LeaderMotion;

/// Offsets and velocities of all agents.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub z: Vec<f64>,
    pub v: Vec<f64>,
}

impl State {
    pub fn equilibrium(n: usize) -> Self {
        State {
            z: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.z
            .iter()
            .chain(&self.v)
            .fold(0.0f64, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
    }
}

/// Coupling coefficients laid out per agent for the inner loop.
pub(crate) struct Chain {
    gx: Vec<f64>,
    gv: Vec<f64>,
    rxp: Vec<f64>,
    rxm: Vec<f64>,
    rvp: Vec<f64>,
    rvm: Vec<f64>,
}

impl Chain {
    pub(crate) fn new(config: &FlockConfig) -> Self {
        let n = config.n();
        let col = |f: fn(&crate::lattice::AgentCoupling) -> f64| -> Vec<f64> {
            (0..n).map(|k| f(config.agent(k))).collect()
        };
        Chain {
            gx: col(|a| a.g_x),
            gv: col(|a| a.g_v),
            rxp: col(|a| a.rho_x_plus),
            rxm: col(|a| a.rho_x_minus),
            rvp: col(|a| a.rho_v_plus),
            rvm: col(|a| a.rho_v_minus),
        }
    }

    /// Accelerations of agents `1..N`; the leader entry is left at zero.
    fn accelerations(&self, z: &[f64], v: &[f64], out: &mut [f64]) {
        let n = z.len();
        out[0] = 0.0;
        if n < 2 {
            return;
        }
        for k in 1..n - 1 {
            out[k] = -self.gx[k] * (z[k] + self.rxp[k] * z[k + 1] + self.rxm[k] * z[k - 1])
                - self.gv[k] * (v[k] + self.rvp[k] * v[k + 1] + self.rvm[k] * v[k - 1]);
        }
        let t = n - 1;
        out[t] = -self.gx[t] * (z[t] - z[t - 1]) - self.gv[t] * (v[t] - v[t - 1]);
    }
}

pub(crate) struct Rk4 {
    chain: Chain,
    leader: LeaderMotion,
    kz: [Vec<f64>; 4],
    kv: [Vec<f64>; 4],
    tz: Vec<f64>,
    tv: Vec<f64>,
}

impl Rk4 {
    pub(crate) fn new(config: &FlockConfig, leader: LeaderMotion) -> Self {
        let n = config.n();
        let zeros = || vec![0.0; n];
        Rk4 {
            chain: Chain::new(config),
            leader,
            kz: [zeros(), zeros(), zeros(), zeros()],
            kv: [zeros(), zeros(), zeros(), zeros()],
            tz: zeros(),
            tv: zeros(),
        }
    }

    pub(crate) fn pin_leader(&self, state: &mut State, t: f64) {
        if !state.z.is_empty() {
            let (z0, v0) = self.leader.state(t);
            state.z[0] = z0;
            state.v[0] = v0;
        }
    }

    /// Advances `state` from `t` to `t + h`.
    pub(crate) fn step(&mut self, state: &mut State, t: f64, h: f64) {
        let n = state.z.len();
        let stages = [(0.0, 0.0), (0.5, 0.5), (0.5, 0.5), (1.0, 1.0)];
        for (s, &(frac, weight)) in stages.iter().enumerate() {
            let ts = t + frac * h;
            if s == 0 {
                self.tz.copy_from_slice(&state.z);
                self.tv.copy_from_slice(&state.v);
            } else {
                let (kz, kv) = (&self.kz[s - 1], &self.kv[s - 1]);
                for k in 0..n {
                    self.tz[k] = state.z[k] + weight * h * kz[k];
                    self.tv[k] = state.v[k] + weight * h * kv[k];
                }
            }
            if n > 0 {
                let (z0, v0) = self.leader.state(ts);
                self.tz[0] = z0;
                self.tv[0] = v0;
            }
            self.kz[s].copy_from_slice(&self.tv);
            self.chain
                .accelerations(&self.tz, &self.tv, &mut self.kv[s]);
        }
        let sixth = h / 6.0;
        for k in 0..n {
            state.z[k] += sixth
                * (self.kz[0][k] + 2.0 * self.kz[1][k] + 2.0 * self.kz[2][k] + self.kz[3][k]);
            state.v[k] += sixth
                * (self.kv[0][k] + 2.0 * self.kv[1][k] + 2.0 * self.kv[2][k] + self.kv[3][k]);
        }
        self.pin_leader(state, t + h);
    }
}
