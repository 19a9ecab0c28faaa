//! Dense polynomials with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex;

use crate::error::{FlockError, Result};

pub type C64 = Complex<f64>;

/// Polynomial with complex coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl ComplexPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = ComplexPoly { coeffs };
        p.trim_exact();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|c| C64::new(*c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: C64, c1: C64) -> Self {
        Self::new(vec![c0, c1])
    }

    fn trim_exact(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero past the end).
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    /// `sum |c_k| |x|^k`, the natural size against which `|P(x)|` is judged.
    pub fn eval_scale(&self, x: C64) -> f64 {
        let r = x.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_diff(&self, other: &ComplexPoly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Roots via eigenvalues of the companion matrix of the monic, rescaled
    /// polynomial, followed by Newton polishing where the residual is large.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let n = match self.degree() {
            None => {
                return Err(FlockError::RootFinding {
                    mode: 0,
                    reason: "zero polynomial".into(),
                })
            }
            Some(0) => return Ok(Vec::new()),
            Some(n) => n,
        };
        let lead = self.coeffs[n];
        // Root magnitude scale: max_k |c_k / c_n|^(1/(n-k)).
        let radius = (0..n)
            .map(|k| (self.coeffs[k] / lead).norm().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max);
        if radius == 0.0 {
            return Ok(vec![C64::new(0.0, 0.0); n]);
        }
        // Monic polynomial in w = x / radius.
        let monic: Vec<C64> = (0..n)
            .map(|k| self.coeffs[k] / lead * radius.powi(k as i32 - n as i32))
            .collect();
        let companion = DMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -monic[i]
            } else if i == j + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let schur = Schur::try_new(balance(companion), f64::EPSILON, 10_000).ok_or_else(|| {
            FlockError::RootFinding {
                mode: 0,
                reason: "companion Schur decomposition did not converge".into(),
            }
        })?;
        let eig = schur.eigenvalues().ok_or_else(|| FlockError::RootFinding {
            mode: 0,
            reason: "complex Schur form not triangular".into(),
        })?;
        let deriv = self.derivative();
        Ok(eig
            .iter()
            .map(|w| self.polish(w * radius, &deriv))
            .collect())
    }

    /// A few guarded Newton steps, each accepted only if it lowers `|P|`.
    fn polish(&self, mut x: C64, deriv: &ComplexPoly) -> C64 {
        for _ in 0..3 {
            let px = self.eval(x);
            if px.norm() <= 1e-10 * self.eval_scale(x) {
                break;
            }
            let dx = deriv.eval(x);
            if dx.norm() == 0.0 {
                break;
            }
            let candidate = x - px / dx;
            if self.eval(candidate).norm() < px.norm() {
                x = candidate;
            } else {
                break;
            }
        }
        x
    }
}

/// Parlett–Reinsch diagonal balancing with power-of-two scale factors; the
/// returned matrix is similar to the input.
fn balance(mut m: DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].l1_norm();
                    row += m[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            while col < row / 2.0 {
                col *= 2.0;
                row /= 2.0;
                f *= 2.0;
            }
            while col >= row * 2.0 {
                col /= 2.0;
                row *= 2.0;
                f /= 2.0;
            }
            if col + row < 0.95 * total {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    m
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}
