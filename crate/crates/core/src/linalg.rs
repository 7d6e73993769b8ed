//! Dense solves for the discounted linear systems `(I - γ M) x = b`.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Solves `(I - gamma * m) x = b` by LU with partial pivoting.
pub fn solve_discounted(m: ArrayView2<f64>, gamma: f64, b: ArrayView1<f64>) -> Result<Array1<f64>> {
    let n = m.nrows();
    debug_assert_eq!(m.ncols(), n);
    debug_assert_eq!(b.len(), n);
    let a = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - gamma * m[[i, j]]
    });
    let rhs = DVector::from_iterator(n, b.iter().copied());
    let x = a.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(Array1::from_iter(x.iter().copied()))
}

/// Solves `(I - gamma * m^T) x = b`.
pub fn solve_discounted_transposed(
    m: ArrayView2<f64>,
    gamma: f64,
    b: ArrayView1<f64>,
) -> Result<Array1<f64>> {
    solve_discounted(m.t(), gamma, b)
}

/// Induced 1-norm (max column sum of absolute values).
pub fn induced_l1_norm(m: ArrayView2<f64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn identity(n: usize) -> Array2<f64> {
    Array2::eye(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn solves_small_system() {
        let m = array![[0.5, 0.5], [0.0, 1.0]];
        let b = array![1.0, 1.0];
        // (I - 0.5 m) x = b
        let x = solve_discounted(m.view(), 0.5, b.view()).unwrap();
        let a = identity(2) - 0.5 * &m;
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn transposed_matches_explicit_transpose() {
        let m = array![[0.1, 0.9, 0.0], [0.3, 0.3, 0.4], [1.0, 0.0, 0.0]];
        let b = array![0.2, 0.3, 0.5];
        let x1 = solve_discounted_transposed(m.view(), 0.9, b.view()).unwrap();
        let mt = m.t().to_owned();
        let x2 = solve_discounted(mt.view(), 0.9, b.view()).unwrap();
        for (a, b) in x1.iter().zip(x2.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn l1_norm_is_max_column_sum() {
        let m = array![[1.0, -2.0], [3.0, 0.5]];
        assert_eq!(induced_l1_norm(m.view()), 4.0);
    }
}
