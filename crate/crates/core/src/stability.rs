//! Stability of a flock: the product condition on position couplings, the
//! guarantee for symmetric Laplacians with proportional damping, and a
//! numerical classifier over the full spectrum.

use serde::Serialize;

use crate::error::Result;
use crate::lattice::{assemble, Boundary, FlockConfig, DEFAULT_DENSE_CAP};
use crate::numeric::SignedLog;
use crate::spectral::{dense_eigenvalues, spectral_radius, spectrum, C64};

/// Default threshold on real parts separating Stable / Marginal / Unstable.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Largest block routed through the characteristic polynomial instead of the
/// dense eigensolver.
const MAX_POLY_P: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub necessary_condition_holds: bool,
    /// `|prod rho_x+ - prod rho_x-|` over the whole chain, in log form.
    pub product_gap: SignedLog,
    /// `None` when the system is too large for the numeric path.
    pub numeric_verdict: Option<Verdict>,
    /// Largest real part once the structural double zero is set aside.
    pub max_real_part: Option<f64>,
    pub zero_multiplicity: Option<usize>,
    pub symmetric_guarantee_applies: bool,
}

/// Compares `prod rho_x+` with `prod rho_x-` over the `N` agents of the
/// chain. Equal to 1e-12 relative means the condition holds.
pub fn necessary_condition(config: &FlockConfig) -> (bool, SignedLog) {
    let q = config.q as f64;
    let repeat = |s: SignedLog| {
        if s.sign == 0 {
            s
        } else {
            SignedLog {
                sign: if s.sign < 0 && config.q % 2 == 1 { -1 } else { 1 },
                ln_abs: s.ln_abs * q,
            }
        }
    };
    let plus = repeat(SignedLog::product(config.agents.iter().map(|a| a.rho_x_plus)));
    let minus = repeat(SignedLog::product(config.agents.iter().map(|a| a.rho_x_minus)));
    let gap = plus.minus(minus).abs();
    let holds = match (plus.sign, minus.sign) {
        (0, 0) => true,
        (a, b) if a != b => false,
        _ => gap.sign == 0 || gap.ln_abs - plus.ln_abs.max(minus.ln_abs) <= 1e-12f64.ln(),
    };
    (holds, gap)
}

/// All rho = -1/2, positive weights, and `g_v = alpha g_x` for one `alpha`.
pub fn symmetric_guarantee_applies(config: &FlockConfig) -> bool {
    if !config.has_symmetric_rho() {
        return false;
    }
    if config.agents.iter().any(|a| !(a.g_x > 0.0 && a.g_v > 0.0)) {
        return false;
    }
    let alpha = config.agents[0].g_v / config.agents[0].g_x;
    config
        .agents
        .iter()
        .all(|a| (a.g_v / a.g_x - alpha).abs() <= 1e-12 * alpha)
}

/// Eigenvalues of the full system, or `None` above the dense cap.
pub fn system_eigenvalues(config: &FlockConfig) -> Result<Option<Vec<C64>>> {
    config.validate()?;
    if config.boundary == Boundary::Periodic && config.p <= MAX_POLY_P {
        return Ok(Some(spectrum(config)?.merged));
    }
    if config.n() > DEFAULT_DENSE_CAP {
        return Ok(None);
    }
    Ok(Some(dense_eigenvalues(&assemble(config)?.a)?))
}

/// Verdict, largest non-structural real part and zero count of a spectrum.
pub fn classify_eigenvalues(eigs: &[C64], tol: f64) -> (Verdict, f64, usize) {
    let zero_tol = 1e-6 * spectral_radius(eigs).max(1.0);
    let mut by_size: Vec<&C64> = eigs.iter().collect();
    by_size.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let zeros = by_size.iter().filter(|z| z.norm() <= zero_tol).count();
    let skip = zeros.min(2);
    let max_re = by_size[skip..]
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let verdict = if max_re > tol {
        Verdict::Unstable
    } else if max_re < -tol {
        Verdict::Stable
    } else {
        Verdict::Marginal
    };
    (verdict, max_re, zeros)
}

pub fn classify(config: &FlockConfig, tol: f64) -> Result<StabilityReport> {
    let (holds, gap) = necessary_condition(config);
    let guarantee = symmetric_guarantee_applies(config);
    let numeric = system_eigenvalues(config)?.map(|eigs| classify_eigenvalues(&eigs, tol));
    if guarantee && numeric.is_some_and(|n| n.0 != Verdict::Stable) {
        log::warn!("symmetric guarantee applies but numeric verdict is {:?}", numeric);
    }
    Ok(StabilityReport {
        necessary_condition_holds: holds,
        product_gap: gap,
        numeric_verdict: numeric.map(|n| n.0),
        max_real_part: numeric.map(|n| n.1),
        zero_multiplicity: numeric.map(|n| n.2),
        symmetric_guarantee_applies: guarantee,
    })
}

/// Per-row Gershgorin data of `D A D^-1` with `D = diag(I, I / beta)`,
/// `beta = sqrt(max |g_x|)`: `(center, radius)` for every row.
fn gershgorin_rows(config: &FlockConfig) -> Vec<(f64, f64)> {
    let n = config.n();
    let beta = config
        .agents
        .iter()
        .map(|a| a.g_x.abs())
        .fold(0.0, f64::max)
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let mut rows = vec![(0.0, beta); n];
    for k in 0..n {
        let a = config.agent(k);
        // Off-diagonal |L| entries of row k, and the diagonal of L.
        let (lx_off, lv_off, diag) = match config.boundary {
            Boundary::Periodic if n == 1 => (0.0, 0.0, -1.0 - a.rho_x_plus - a.rho_x_minus),
            Boundary::Periodic if n == 2 => (
                (a.rho_x_plus + a.rho_x_minus).abs(),
                (a.rho_v_plus + a.rho_v_minus).abs(),
                -1.0,
            ),
            Boundary::Periodic => (
                a.rho_x_plus.abs() + a.rho_x_minus.abs(),
                a.rho_v_plus.abs() + a.rho_v_minus.abs(),
                -1.0,
            ),
            Boundary::OpenLine if k == 0 => (0.0, 0.0, 0.0),
            Boundary::OpenLine if k == n - 1 => (1.0, 1.0, -1.0),
            Boundary::OpenLine => (
                a.rho_x_plus.abs() + a.rho_x_minus.abs(),
                a.rho_v_plus.abs() + a.rho_v_minus.abs(),
                -1.0,
            ),
        };
        let lv_diag = if config.boundary == Boundary::Periodic && n == 1 {
            -1.0 - a.rho_v_plus - a.rho_v_minus
        } else {
            diag
        };
        let center = a.g_v * lv_diag;
        let radius = a.g_x.abs() * (diag.abs() + lx_off) / beta + a.g_v.abs() * lv_off;
        rows.push((center, radius));
    }
    rows
}

/// Upper bound on the largest real part of the spectrum. Never negative for
/// row-sum-zero systems, and homogeneous of degree one under
/// `g_x -> s^2 g_x`, `g_v -> s g_v`.
pub fn gershgorin_prescreen(config: &FlockConfig) -> f64 {
    gershgorin_rows(config)
        .iter()
        .map(|(c, r)| c + r)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Upper bound on the spectral radius, used to vet integrator steps.
pub fn spectral_radius_bound(config: &FlockConfig) -> f64 {
    gershgorin_rows(config)
        .iter()
        .map(|(c, r)| c.abs() + r)
        .fold(0.0, f64::max)
}
