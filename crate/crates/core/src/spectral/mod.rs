//! Spectra of periodic flocks through the reduced characteristic polynomial.
//!
//! For a ring of `q` copies of a `p`-agent block, every eigenvector is a
//! Bloch wave: the block pattern `epsilon` repeated with phase `e^{i phi c}`
//! on copy `c`, `phi = 2 pi m / q`. Each mode contributes the `2p` roots of
//! the determinant `P_phi(nu)` of a `p x p` matrix of quadratics.

mod charpoly;
mod dense;
mod locus;
mod poly;
mod tridiag;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use charpoly::{
    char_poly, determinant_poly, mode_matrix, phi_split, psi_products, psi_triple, PolyMatrix,
    PsiTriple,
};
pub use dense::{dense_eigenvalues, match_multisets, spectral_radius};
pub use locus::{locus_trace, LocusPoint};
pub use poly::{ComplexPoly, C64};
pub use tridiag::tridiag_det;

use crate::error::{FlockError, Result};
use crate::lattice::{Boundary, FlockConfig};

/// Distance below which the two `m = 0` roots nearest the origin are set to 0.
pub const DOUBLE_ROOT_SNAP: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct ModeRoots {
    pub m: usize,
    pub phi: f64,
    pub roots: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub modes: Vec<ModeRoots>,
    /// All `2N` eigenvalues, mode by mode.
    pub merged: Vec<C64>,
    /// Block eigenvectors `epsilon`, indexed like `modes[m].roots`.
    pub eigvecs: Option<Vec<Vec<Vec<C64>>>>,
}

impl SpectrumResult {
    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.merged)
    }
}

pub fn mode_phase(m: usize, q: usize) -> f64 {
    2.0 * PI * m as f64 / q as f64
}

fn mode_roots(config: &FlockConfig, m: usize) -> Result<ModeRoots> {
    let phi = mode_phase(m, config.q);
    let poly = char_poly(config, phi)?;
    let mut roots = poly.roots().map_err(|e| match e {
        FlockError::RootFinding { reason, .. } => FlockError::RootFinding { mode: m, reason },
        other => other,
    })?;
    if m == 0 {
        snap_double_root(&mut roots);
    }
    Ok(ModeRoots { m, phi, roots })
}

fn snap_double_root(roots: &mut [C64]) {
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| roots[a].norm().total_cmp(&roots[b].norm()));
    for &i in order.iter().take(2) {
        if roots[i].norm() <= DOUBLE_ROOT_SNAP {
            roots[i] = C64::new(0.0, 0.0);
        }
    }
}

/// All `2N` eigenvalues of a periodic flock, one polynomial per mode.
pub fn spectrum(config: &FlockConfig) -> Result<SpectrumResult> {
    config.validate()?;
    if config.boundary != Boundary::Periodic {
        return Err(FlockError::WrongBoundary {
            expected: "periodic",
        });
    }
    let modes = (0..config.q)
        .into_par_iter()
        .map(|m| mode_roots(config, m))
        .collect::<Result<Vec<_>>>()?;
    let merged = modes.iter().flat_map(|m| m.roots.iter().copied()).collect();
    Ok(SpectrumResult {
        modes,
        merged,
        eigvecs: None,
    })
}

/// As [`spectrum`], with a block eigenvector for every root.
pub fn spectrum_with_eigvecs(config: &FlockConfig) -> Result<SpectrumResult> {
    let mut result = spectrum(config)?;
    let vecs = result
        .modes
        .iter()
        .map(|mode| {
            mode.roots
                .iter()
                .map(|&nu| eigvec_for_root(config, mode.m, nu))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    result.eigvecs = Some(vecs);
    Ok(result)
}

/// Unit-norm null vector of the mode matrix at `(nu, 2 pi m / q)`, phased so
/// its largest component is real and positive.
pub fn eigvec_for_root(config: &FlockConfig, m: usize, nu: C64) -> Result<Vec<C64>> {
    config.validate()?;
    let phi = mode_phase(m, config.q);
    let matrix = mode_matrix(config, phi).eval(nu);
    let p = config.p;
    let svd = matrix.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or(FlockError::Eigensolver)?;
    let sigma = &svd.singular_values;
    let (imin, smin) = sigma
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, s)| (i, *s))
        .ok_or(FlockError::Eigensolver)?;
    let norm = sigma.max().max(f64::MIN_POSITIVE);
    if smin > 1e-6 * norm {
        return Err(FlockError::NotARoot {
            value: format!("{nu}"),
            residual: smin / norm,
        });
    }
    let null_dim = sigma.iter().filter(|s| **s <= 1e-6 * norm).count();
    if null_dim > 1 {
        log::warn!("nullspace of dimension {null_dim} at nu = {nu}; returning one vector");
    }
    let mut eps: Vec<C64> = (0..p).map(|j| v_t[(imin, j)].conj()).collect();
    let (_, pivot) = eps
        .iter()
        .enumerate()
        .fold((0.0, 0), |(best, bi), (i, e)| {
            if e.norm() > best * (1.0 + 1e-12) {
                (e.norm(), i)
            } else {
                (best, bi)
            }
        });
    let phase = eps[pivot].conj() / eps[pivot].norm();
    let scale = eps.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    for e in &mut eps {
        *e = *e * phase / scale;
    }
    Ok(eps)
}

/// Full `2N` state-space eigenvector `(z, nu z)` with
/// `z_{c p + a} = epsilon_a e^{i phi c}`.
pub fn full_eigenvector(config: &FlockConfig, m: usize, nu: C64, eps: &[C64]) -> Vec<C64> {
    let phi = mode_phase(m, config.q);
    let n = config.n();
    let mut out = vec![C64::new(0.0, 0.0); 2 * n];
    for c in 0..config.q {
        let w = C64::from_polar(1.0, phi * c as f64);
        for (a, e) in eps.iter().enumerate() {
            let k = c * config.p + a;
            out[k] = e * w;
            out[n + k] = nu * out[k];
        }
    }
    out
}

/// `|A u - nu u| / (|A| |u|)` using the Frobenius norm of `A`.
pub fn eigen_residual(a: &DMatrix<f64>, nu: C64, u: &[C64]) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0;
    for i in 0..n {
        let mut acc = -nu * u[i];
        for j in 0..n {
            acc += u[j] * a[(i, j)];
        }
        worst += acc.norm_sqr();
    }
    let un = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    worst.sqrt() / (a.norm() * un).max(f64::MIN_POSITIVE)
}
