//! Low-frequency expansion of the slow root pair and the physical
//! predictions built from it.
//!
//! Near `(nu, phi) = (0, 0)` the characteristic polynomial of a block with
//! symmetric couplings is `sum a_jk nu^j phi^k` with
//! `a02 phi^2 + a12 nu phi^2 + a20 nu^2 + a30 nu^3` the terms that fix the
//! slow pair to second order. Each carries the factor `2^-p prod g_x`. The factor
//! overflows for long blocks, so it is kept in log form and the physics is
//! computed from the reduced coefficients.

use crate::error::{FlockError, Result};
use crate::lattice::FlockConfig;
use crate::numeric::compensated_sum;
use crate::spectral::C64;

/// Largest block for which raw coefficients are materialized.
pub const RAW_COEFFICIENT_MAX_P: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoefficients {
    pub p: usize,
    /// `ln(2^-p prod g_x)`.
    pub ln_common: f64,
    /// `(a02, a12, a20, a30)` divided by the common factor.
    pub reduced: [f64; 4],
}

impl TaylorCoefficients {
    /// `(a02, a12, a20, a30)`, only for `p <= 64`.
    pub fn raw(&self) -> Option<[f64; 4]> {
        (self.p <= RAW_COEFFICIENT_MAX_P).then(|| {
            let k = self.ln_common.exp();
            self.reduced.map(|r| r * k)
        })
    }

    pub fn a02_over_a20(&self) -> f64 {
        self.reduced[0] / self.reduced[2]
    }

    pub fn a12_over_a20(&self) -> f64 {
        self.reduced[1] / self.reduced[2]
    }

    pub fn a30_over_a20(&self) -> f64 {
        self.reduced[3] / self.reduced[2]
    }
}

struct Sums {
    inv_gx: f64,
    gv_over_gx: f64,
    gv_over_gx2: f64,
}

fn check_domain(config: &FlockConfig) -> Result<()> {
    config.validate()?;
    if !config.has_symmetric_rho() {
        return Err(FlockError::ExpansionDomain(
            "symmetric rho (all -1/2)".into(),
        ));
    }
    // Negated so that NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if let Some(a) = config.agents.iter().find(|a| !(a.g_x > 0.0)) {
        return Err(FlockError::ExpansionDomain(format!(
            "positive g_x (found {})",
            a.g_x
        )));
    }
    Ok(())
}

fn sums(config: &FlockConfig) -> Sums {
    let a = &config.agents;
    Sums {
        inv_gx: compensated_sum(a.iter().map(|a| 1.0 / a.g_x)),
        gv_over_gx: compensated_sum(a.iter().map(|a| a.g_v / a.g_x)),
        gv_over_gx2: compensated_sum(a.iter().map(|a| a.g_v / (a.g_x * a.g_x))),
    }
}

pub fn coefficients(config: &FlockConfig) -> Result<TaylorCoefficients> {
    check_domain(config)?;
    let p = config.p;
    let s = sums(config);
    let ln_common =
        compensated_sum(config.agents.iter().map(|a| a.g_x.ln())) - p as f64 * 2f64.ln();
    let two_p = 2.0 * p as f64;
    Ok(TaylorCoefficients {
        p,
        ln_common,
        reduced: [
            1.0,
            s.gv_over_gx,
            two_p * s.inv_gx,
            two_p * (s.inv_gx * s.gv_over_gx - s.gv_over_gx2),
        ],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult {
    pub coefficients: TaylorCoefficients,
    /// Raw `a02, a12, a20, a30`, absent for `p > 64`.
    pub a02: Option<f64>,
    pub a12: Option<f64>,
    pub a20: Option<f64>,
    pub a30: Option<f64>,
    /// First derivative of the upper branch at `phi = 0`; the other is `-gamma1`.
    pub gamma1: C64,
    pub gamma2: f64,
    pub c1: f64,
    pub c2: f64,
    /// `c2` with the `(2 Avg(1/g_x))^2` denominator, half of `c2`.
    pub c2_alt: f64,
    pub t1: f64,
    pub avg_inv_gx: f64,
    pub avg_gv_over_gx2: f64,
}

pub fn expand(config: &FlockConfig) -> Result<ExpansionResult> {
    let coefficients = coefficients(config)?;
    let p = config.p as f64;
    let s = sums(config);
    let avg_inv_gx = s.inv_gx / p;
    let avg_gv_over_gx2 = s.gv_over_gx2 / p;

    let gamma1 = C64::new(0.0, coefficients.a02_over_a20().sqrt());
    // (a30 a02 - a12 a20) / a20^2 in reduced form.
    let r = coefficients.reduced;
    let gamma2 = (r[3] * r[0] - r[1] * r[2]) / (r[2] * r[2]);
    let c1 = p * gamma1.im;
    let raw = coefficients.raw();
    Ok(ExpansionResult {
        coefficients,
        a02: raw.map(|a| a[0]),
        a12: raw.map(|a| a[1]),
        a20: raw.map(|a| a[2]),
        a30: raw.map(|a| a[3]),
        gamma1,
        gamma2,
        c1,
        c2: p * p * gamma2.abs(),
        c2_alt: avg_gv_over_gx2 / (4.0 * avg_inv_gx * avg_inv_gx),
        t1: p / c1,
        avg_inv_gx,
        avg_gv_over_gx2,
    })
}

/// Second-order approximation of the slow pair of mode `m` on a chain of
/// `N = p q` agents: `+-i c1 theta - (c2 / 2) theta^2`, `theta = 2 pi m / N`.
///
/// The quadratic term is `gamma2 (theta p)^2 / 2`, i.e. half of `c2 theta^2`.
pub fn mode_locus(config: &FlockConfig, m: i64) -> Result<(C64, C64)> {
    let e = expand(config)?;
    let theta = 2.0 * std::f64::consts::PI * m as f64 / config.n() as f64;
    let re = -0.5 * e.c2 * theta * theta;
    let im = e.c1 * theta;
    Ok((C64::new(re, im), C64::new(re, -im)))
}
