//! Determinant of the row-sum-structured tri-diagonal matrix with diagonal
//! `c_i + d_i`, super-diagonal `-c_i` and sub-diagonal `-d_i`.

/// `sum_{k=0}^{n} d_1...d_k c_{k+1}...c_n`, evaluated in `O(n)` with prefix
/// and suffix products.
///
/// # Panics
/// If `c` and `d` differ in length or are empty.
pub fn tridiag_det(c: &[f64], d: &[f64]) -> f64 {
    assert_eq!(c.len(), d.len(), "c and d must have equal length");
    assert!(!c.is_empty(), "n must be at least 1");
    let n = c.len();
    let mut suffix = vec![1.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] * c[k];
    }
    let mut prefix = 1.0;
    let mut total = suffix[0];
    for k in 0..n {
        prefix *= d[k];
        total += prefix * suffix[k + 1];
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_case() {
        assert_eq!(tridiag_det(&[1.5], &[2.0]), 3.5);
    }

    #[test]
    fn zero_c_gives_product_of_d() {
        assert_eq!(tridiag_det(&[0.0; 4], &[1.0, 2.0, 3.0, 4.0]), 24.0);
    }

    #[test]
    fn two_by_two_by_hand() {
        // (c1+d1)(c2+d2) - c1 d2
        let (c1, c2, d1, d2) = (0.3, -1.2, 0.7, 2.0);
        let det = (c1 + d1) * (c2 + d2) - c1 * d2;
        assert!((tridiag_det(&[c1, c2], &[d1, d2]) - det).abs() < 1e-15);
    }
}
