use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DENSE_ORDER: usize = 12;

/// Determinant of the `n x n` Gaussian-integral matrix with `M[0][0] = eta - i`,
/// `M[l][l] = -i beta` for `l >= 1`, and `i` on both off-diagonals, by
/// Gaussian elimination with partial pivoting on the full matrix.
pub fn dense_determinant(eta: Complex64, beta: f64, n: usize) -> Result<Complex64> {
    if n == 0 || n > MAX_DENSE_ORDER {
        return Err(Error::Domain(format!(
            "dense determinant order must be in 1..={MAX_DENSE_ORDER}, got {n}"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut m = vec![vec![zero; n]; n];
    for l in 0..n {
        m[l][l] = if l == 0 { eta - i } else { -i * beta };
        if l + 1 < n {
            m[l][l + 1] = i;
            m[l + 1][l] = i;
        }
    }
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .expect("non-empty range");
        if m[pivot][col] == zero {
            return Ok(zero);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::q_values;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_orders() {
        let eta = c(0.3, 0.8);
        assert_eq!(dense_determinant(eta, 1.7, 1).unwrap(), eta - c(0.0, 1.0));
        assert!((dense_determinant(c(1.0, 1.0), 0.0, 2).unwrap() - 1.0).norm() < 1e-15);
        assert!(dense_determinant(eta, 1.0, 0).is_err());
        assert!(dense_determinant(eta, 1.0, 13).is_err());
    }

    #[test]
    fn matches_recurrence() {
        let eta = c(1.0, -0.5);
        let q = q_values(eta, 1.3, 12);
        for n in 1..=12 {
            let d = dense_determinant(eta, 2.0 - 1.3, n).unwrap();
            assert!((d - q[n]).norm() < 1e-10 * (1.0 + q[n].norm()), "n = {n}");
        }
    }

    #[test]
    fn matches_recurrence_outside_band() {
        for xi in [-0.5, 4.5, 7.0] {
            let eta = c(0.6, 0.2);
            let q = q_values(eta, xi, 12);
            for n in 1..=12 {
                let d = dense_determinant(eta, 2.0 - xi, n).unwrap();
                assert!((d - q[n]).norm() < 1e-10 * (1.0 + q[n].norm()), "xi {xi} n {n}");
            }
        }
    }
}
