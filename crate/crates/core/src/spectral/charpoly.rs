//! The reduced `p x p` polynomial matrix of a periodic flock and its
//! determinant `P_phi(nu)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::poly::{ComplexPoly, C64};
use crate::error::{FlockError, Result};
use crate::lattice::{AgentCoupling, FlockConfig};
use crate::numeric::compensated_sum;

/// The degree-one polynomials bundling an agent's position and velocity gains.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiTriple {
    /// `g_v nu + g_x`
    pub psi0: ComplexPoly,
    /// `g_v rho_v+ nu + g_x rho_x+`
    pub psi_plus: ComplexPoly,
    /// `g_v rho_v- nu + g_x rho_x-`
    pub psi_minus: ComplexPoly,
}

impl PsiTriple {
    /// `psi_- + psi_0 + psi_+`, identically zero for row-sum-zero couplings.
    pub fn sum(&self) -> ComplexPoly {
        &(&self.psi_minus + &self.psi0) + &self.psi_plus
    }
}

pub fn psi_triple(agent: &AgentCoupling) -> PsiTriple {
    let lin = |c0: f64, c1: f64| ComplexPoly::linear(C64::new(c0, 0.0), C64::new(c1, 0.0));
    PsiTriple {
        psi0: lin(agent.g_x, agent.g_v),
        psi_plus: lin(agent.g_x * agent.rho_x_plus, agent.g_v * agent.rho_v_plus),
        psi_minus: lin(agent.g_x * agent.rho_x_minus, agent.g_v * agent.rho_v_minus),
    }
}

/// `p x p` matrix whose entries are polynomials of degree at most two.
#[derive(Debug, Clone)]
pub struct PolyMatrix {
    p: usize,
    entries: Vec<ComplexPoly>,
}

impl PolyMatrix {
    pub fn size(&self) -> usize {
        self.p
    }

    pub fn entry(&self, i: usize, j: usize) -> &ComplexPoly {
        &self.entries[i * self.p + j]
    }

    pub fn eval(&self, nu: C64) -> DMatrix<C64> {
        DMatrix::from_fn(self.p, self.p, |i, j| self.entry(i, j).eval(nu))
    }
}

/// Mode matrix for phase `phi`: diagonal `nu^2 + psi_0`, band `psi_+` above
/// and `psi_-` below, with the wrap-around entries carrying `e^{-i phi}` on
/// `(0, p-1)` and `e^{i phi}` on `(p-1, 0)`. For `p <= 2` band and corner
/// entries coincide and add.
pub fn mode_matrix(config: &FlockConfig, phi: f64) -> PolyMatrix {
    let p = config.p;
    let mut entries = vec![ComplexPoly::zero(); p * p];
    let forward = C64::from_polar(1.0, phi);
    let backward = C64::from_polar(1.0, -phi);
    let nu2 = ComplexPoly::from_real(&[0.0, 0.0, 1.0]);
    for (a, agent) in config.agents.iter().enumerate() {
        let psi = psi_triple(agent);
        let diag = a * p + a;
        entries[diag] = &entries[diag] + &(&nu2 + &psi.psi0);

        let ahead = (a + 1) % p;
        let plus = if a == p - 1 {
            psi.psi_plus.scale(forward)
        } else {
            psi.psi_plus
        };
        entries[a * p + ahead] = &entries[a * p + ahead] + &plus;

        let behind = (a + p - 1) % p;
        let minus = if a == 0 {
            psi.psi_minus.scale(backward)
        } else {
            psi.psi_minus
        };
        entries[a * p + behind] = &entries[a * p + behind] + &minus;
    }
    PolyMatrix { p, entries }
}

/// Radii of the interpolation circles: powers of two from 1/8 up to a bound
/// on the root magnitudes.
fn sample_radii(config: &FlockConfig) -> Vec<f64> {
    let max_gv = config.agents.iter().map(|a| a.g_v.abs()).fold(0.0, f64::max);
    let max_gx = config.agents.iter().map(|a| a.g_x.abs()).fold(0.0, f64::max);
    let bound = (2.0 * max_gv + 2.0 * max_gx.sqrt()).max(1.0);
    let top = bound.log2().ceil() as i32;
    (-3..=top).map(|e| 2f64.powi(e)).collect()
}

/// Determinant polynomial of a polynomial matrix of known maximal degree.
///
/// On each circle `|nu| = R` the matrix is evaluated at the `degree + 1`
/// scaled roots of unity and the coefficients recovered by an inverse DFT.
/// Coefficient `k` from radius `R` carries an error of order
/// `eps max|det| / R^k`; each coefficient is taken from the circle minimizing
/// that bound, so the small coefficients near the double root come from small
/// circles and the leading ones from large circles.
pub fn determinant_poly(matrix: &PolyMatrix, degree: usize, radii: &[f64]) -> Result<ComplexPoly> {
    if radii.is_empty() {
        return Err(FlockError::Interpolation("no sample radii".into()));
    }
    let n = degree + 1;
    let roots_of_unity: Vec<C64> = (0..n)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect();
    let mut best = vec![C64::new(0.0, 0.0); n];
    let mut best_err = vec![f64::INFINITY; n];
    for &radius in radii {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FlockError::Interpolation(format!(
                "sample radius {radius} must be positive and finite"
            )));
        }
        let values: Vec<C64> = roots_of_unity
            .iter()
            .map(|w| {
                let m = matrix.eval(w * radius);
                if matrix.size() == 1 {
                    m[(0, 0)]
                } else {
                    m.lu().determinant()
                }
            })
            .collect();
        let size = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for k in 0..n {
            let err = size / radius.powi(k as i32);
            if err >= best_err[k] {
                continue;
            }
            let re = compensated_sum(
                (0..n).map(|j| (values[j] * roots_of_unity[(j * k) % n].conj()).re),
            );
            let im = compensated_sum(
                (0..n).map(|j| (values[j] * roots_of_unity[(j * k) % n].conj()).im),
            );
            best[k] = C64::new(re, im) / (n as f64 * radius.powi(k as i32));
            best_err[k] = err;
        }
    }
    Ok(ComplexPoly::new(best))
}

/// `P_phi(nu)`, the degree-`2p` polynomial whose roots are the eigenvalues
/// belonging to Fourier mode phase `phi`.
pub fn char_poly(config: &FlockConfig, phi: f64) -> Result<ComplexPoly> {
    config.validate()?;
    let matrix = mode_matrix(config, phi);
    determinant_poly(&matrix, 2 * config.p, &sample_radii(config))
}

fn product(polys: impl Iterator<Item = ComplexPoly>) -> ComplexPoly {
    polys.fold(ComplexPoly::from_real(&[1.0]), |acc, p| &acc * &p)
}

/// `prod_a psi_+^(a)` and `prod_a psi_-^(a)`.
pub fn psi_products(config: &FlockConfig) -> (ComplexPoly, ComplexPoly) {
    let triples: Vec<PsiTriple> = config.agents.iter().map(psi_triple).collect();
    (
        product(triples.iter().map(|t| t.psi_plus.clone())),
        product(triples.iter().map(|t| t.psi_minus.clone())),
    )
}

/// Splits `P_phi = s + (-1)^p r_phi` where `s = P_0` and
/// `r_phi = (1 - e^{i phi}) prod psi_+ + (1 - e^{-i phi}) prod psi_-`.
pub fn phi_split(config: &FlockConfig, phi: f64) -> Result<(ComplexPoly, ComplexPoly)> {
    let s = char_poly(config, 0.0)?;
    let (plus, minus) = psi_products(config);
    let one = C64::new(1.0, 0.0);
    let r = &plus.scale(one - C64::from_polar(1.0, phi))
        + &minus.scale(one - C64::from_polar(1.0, -phi));
    Ok((s, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_config, Boundary, WeightDistribution};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_config(p: usize, seed: u64) -> FlockConfig {
        build_config(
            p,
            1,
            &WeightDistribution::Uniform { lo: 0.5, hi: 2.0 },
            &WeightDistribution::Uniform { lo: 0.5, hi: 2.0 },
            Boundary::Periodic,
            0.0,
            seed,
        )
        .unwrap()
    }

    /// Naive Laplace expansion along the first row, in polynomial arithmetic.
    fn cofactor_det(m: &[Vec<ComplexPoly>]) -> ComplexPoly {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut total = ComplexPoly::zero();
        for col in 0..n {
            let minor: Vec<Vec<ComplexPoly>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != col)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][col] * &cofactor_det(&minor);
            total = if col % 2 == 0 {
                &total + &term
            } else {
                &total - &term
            };
        }
        total
    }

    #[test]
    fn psi_triple_values() {
        let t = psi_triple(&AgentCoupling::symmetric(2.0, 1.0));
        assert_eq!(t.psi0, ComplexPoly::from_real(&[2.0, 1.0]));
        assert_eq!(t.psi_plus, ComplexPoly::from_real(&[-1.0, -0.5]));
        assert_eq!(t.psi_plus, t.psi_minus);
        assert!(t.sum().is_zero());
    }

    #[test]
    fn single_identical_agent_is_nu_squared() {
        let c = FlockConfig::from_agents(
            vec![AgentCoupling::symmetric(1.0, 1.0)],
            1,
            Boundary::Periodic,
            0.0,
            0,
        )
        .unwrap();
        let p0 = char_poly(&c, 0.0).unwrap();
        assert!(p0.max_coeff_diff(&ComplexPoly::from_real(&[0.0, 0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn p2_low_order_terms_vanish_at_phi_zero() {
        let c = random_config(2, 11);
        let p0 = char_poly(&c, 0.0).unwrap();
        let scale = p0.max_abs_coeff();
        assert!(p0.coeff(0).norm() <= 1e-12 * scale);
        assert!(p0.coeff(1).norm() <= 1e-12 * scale);
        assert_eq!(p0.degree(), Some(4));
    }

    #[test]
    fn p3_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let c = random_config(3, 5);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let pm = mode_matrix(&c, phi);
        let rows: Vec<Vec<ComplexPoly>> = (0..3)
            .map(|i| (0..3).map(|j| pm.entry(i, j).clone()).collect())
            .collect();
        let oracle = cofactor_det(&rows);
        let fast = char_poly(&c, phi).unwrap();
        for _ in 0..10 {
            let nu = C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let a = fast.eval(nu);
            let b = oracle.eval(nu);
            assert!((a - b).norm() <= 1e-11 * b.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn phi_split_identity() {
        let c = random_config(3, 21);
        let phi = 2.0 * PI / 5.0;
        let (s, r) = phi_split(&c, phi).unwrap();
        let full = char_poly(&c, phi).unwrap();
        let recombined = &s - &r; // (-1)^3 = -1
        assert!(full.max_coeff_diff(&recombined) <= 1e-10 * full.max_abs_coeff());
        let (_, r0) = phi_split(&c, 0.0).unwrap();
        assert!(r0.is_zero() || r0.max_abs_coeff() == 0.0);
    }

    #[test]
    fn symmetric_remainder_is_real_cosine_scaling() {
        let c = random_config(4, 2);
        let phi = 0.7;
        let (_, r) = phi_split(&c, phi).unwrap();
        let (plus, _) = psi_products(&c);
        let expected = plus.scale(C64::new(2.0 * (1.0 - phi.cos()), 0.0));
        assert!(r.max_coeff_diff(&expected) < 1e-14);
    }
}
