//! Dense eigenvalues of the assembled system matrix, used as an oracle and
//! for open-line stability checks.

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::{DMatrix, Schur};

use super::poly::C64;
use crate::error::{FlockError, Result};

/// All eigenvalues of a real square matrix (balanced, then real Schur).
pub fn dense_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<C64>> {
    let mut m = a.clone();
    balance_parlett_reinsch(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 100_000).ok_or(FlockError::Eigensolver)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Pairs two multisets greedily by globally smallest distance and returns
/// the largest paired distance, or `None` when the sizes differ.
pub fn match_multisets(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(d);
        matched += 1;
        if matched == a.len() {
            break;
        }
    }
    Some(worst)
}

pub fn spectral_radius(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_block() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let eig = dense_eigenvalues(&a).unwrap();
        let d = match_multisets(&eig, &[C64::new(0.0, 2.0), C64::new(0.0, -2.0)]).unwrap();
        assert!(d < 1e-14);
    }

    #[test]
    fn matching_is_permutation_free() {
        let a = [C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(2.0, 1.0)];
        let b = [C64::new(2.0, 1.0), C64::new(1.0, 1e-9), C64::new(2.0, 1.0)];
        assert!(match_multisets(&a, &b).unwrap() <= 1e-9);
        assert_eq!(match_multisets(&a, &b[..2]), None);
    }
}
