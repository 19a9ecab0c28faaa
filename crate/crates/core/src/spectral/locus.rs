//! Numerical continuation of the two slow roots leaving `nu = 0` as the mode
//! phase grows.

use super::charpoly::char_poly;
use super::poly::C64;
use crate::error::{FlockError, Result};
use crate::lattice::FlockConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocusPoint {
    pub phi: f64,
    /// Branch with `Im nu` of the same sign as `phi`.
    pub nu_plus: C64,
    pub nu_minus: C64,
}

const NEWTON_ITERS: usize = 60;

fn newton(poly: &super::poly::ComplexPoly, start: C64) -> Option<C64> {
    let deriv = poly.derivative();
    let mut x = start;
    for _ in 0..NEWTON_ITERS {
        let d = deriv.eval(x);
        if d.norm() == 0.0 {
            return None;
        }
        let step = poly.eval(x) / d;
        x -= step;
        if step.norm() <= 1e-15 * x.norm().max(1e-300) {
            return Some(x);
        }
    }
    let residual = poly.eval(x).norm();
    (residual <= 1e-12 * poly.eval_scale(x)).then_some(x)
}

/// Follows both branches at `phi_j = phi_max j / steps`, `j = 1..=steps`.
///
/// The first step seeds from the two polynomial roots nearest the origin;
/// later steps extrapolate linearly from the previous two points and polish
/// with Newton's method.
pub fn locus_trace(config: &FlockConfig, phi_max: f64, steps: usize) -> Result<Vec<LocusPoint>> {
    config.validate()?;
    if !config.has_symmetric_rho() {
        return Err(FlockError::InvalidConfig(
            "locus tracing requires symmetric rho".into(),
        ));
    }
    if steps < 4 {
        return Err(FlockError::InvalidConfig("steps must be at least 4".into()));
    }
    if !(phi_max.is_finite() && phi_max != 0.0) {
        return Err(FlockError::InvalidConfig(
            "phi_max must be finite and nonzero".into(),
        ));
    }
    let lost = |phi: f64, reason: &str| FlockError::LocusTracking {
        last_good_phi: phi,
        reason: reason.to_string(),
    };
    let sign = phi_max.signum();
    let mut out: Vec<LocusPoint> = Vec::with_capacity(steps);
    for j in 1..=steps {
        let phi = phi_max * j as f64 / steps as f64;
        let last_phi = out.last().map_or(0.0, |p| p.phi);
        let poly = char_poly(config, phi)?;
        let (guess_plus, guess_minus) = match out.len() {
            0 => {
                let mut roots = poly
                    .roots()
                    .map_err(|e| lost(last_phi, &e.to_string()))?;
                roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
                let (a, b) = (roots[0], roots[1]);
                if a.im * sign >= b.im * sign {
                    (a, b)
                } else {
                    (b, a)
                }
            }
            1 => {
                let f = phi / last_phi;
                (out[0].nu_plus * f, out[0].nu_minus * f)
            }
            n => {
                let (p1, p0) = (&out[n - 1], &out[n - 2]);
                let t = (phi - p1.phi) / (p1.phi - p0.phi);
                (
                    p1.nu_plus + (p1.nu_plus - p0.nu_plus) * t,
                    p1.nu_minus + (p1.nu_minus - p0.nu_minus) * t,
                )
            }
        };
        let nu_plus = newton(&poly, guess_plus).ok_or_else(|| lost(last_phi, "no convergence"))?;
        let nu_minus =
            newton(&poly, guess_minus).ok_or_else(|| lost(last_phi, "no convergence"))?;
        let separation = (nu_plus - nu_minus).norm();
        if separation <= 1e-3 * (guess_plus - guess_minus).norm() {
            return Err(lost(last_phi, "branches collided"));
        }
        if let Some(prev) = out.last() {
            let jump = (nu_plus - prev.nu_plus).norm().max((nu_minus - prev.nu_minus).norm());
            if jump > 0.5 * separation.max((prev.nu_plus - prev.nu_minus).norm()) {
                return Err(lost(last_phi, "branch jump; reduce the step"));
            }
        }
        out.push(LocusPoint {
            phi,
            nu_plus,
            nu_minus,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{AgentCoupling, Boundary};

    fn single(gx: f64, gv: f64) -> FlockConfig {
        FlockConfig::from_agents(
            vec![AgentCoupling::symmetric(gx, gv)],
            1,
            Boundary::Periodic,
            0.0,
            0,
        )
        .unwrap()
    }

    #[test]
    fn single_agent_matches_quadratic_formula() {
        let (gx, gv) = (2.0, 1.0);
        let trace = locus_trace(&single(gx, gv), 0.5, 50).unwrap();
        for pt in trace {
            // nu^2 + gv (1 - cos) nu + gx (1 - cos) = 0
            let k = 1.0 - pt.phi.cos();
            let b = gv * k;
            let disc = C64::new(b * b - 4.0 * gx * k, 0.0).sqrt();
            let r1 = (-b + disc) / 2.0;
            let r2 = (-b - disc) / 2.0;
            let (up, down) = if r1.im > 0.0 { (r1, r2) } else { (r2, r1) };
            assert!((pt.nu_plus - up).norm() < 1e-9);
            assert!((pt.nu_minus - down).norm() < 1e-9);
        }
    }

    #[test]
    fn negative_phi_gives_conjugate_branches() {
        let c = single(1.5, 0.7);
        let fwd = locus_trace(&c, 0.2, 10).unwrap();
        let back = locus_trace(&c, -0.2, 10).unwrap();
        for (f, b) in fwd.iter().zip(&back) {
            assert!((f.nu_plus.conj() - b.nu_plus).norm() < 1e-12);
            assert!((f.nu_minus.conj() - b.nu_minus).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_short_traces() {
        assert!(locus_trace(&single(1.0, 1.0), 0.1, 3).is_err());
    }
}
