use crate::error::{Error, Result};
use crate::scalar::Scalar;
use nalgebra::DMatrix;

/// Symmetric positive-definite matrix with its Cholesky factor and spectrum
/// bounds, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix<T> {
    dim: usize,
    /// Row-major entries.
    data: Vec<T>,
    /// Row-major lower Cholesky factor.
    chol: Vec<T>,
    min_eig: T,
    max_eig: T,
}

impl<T: Scalar> SpdMatrix<T> {
    /// Validates symmetry (relative 1e-12) and strict positive definiteness.
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("covariance dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { what: "covariance entries", expected: dim * dim, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotPositiveDefinite("non-finite entry".into()));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| data[i * dim + j].f64());
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::NotPositiveDefinite(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        let eig = m.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_eig = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite(format!("minimum eigenvalue {min_eig}")));
        }
        let chol = m.cholesky().ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorisation failed".into()))?.l();
        let chol = (0..dim * dim).map(|k| T::lit(chol[(k / dim, k % dim)])).collect();
        Ok(SpdMatrix { dim, data, chol, min_eig: T::lit(min_eig), max_eig: T::lit(max_eig) })
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, T::one())
    }

    pub fn scaled_identity(dim: usize, v: T) -> Self {
        Self::diagonal(&vec![v; dim]).expect("positive diagonal")
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        let d = diag.len();
        let mut data = vec![T::zero(); d * d];
        for (i, &v) in diag.iter().enumerate() {
            data[i * d + i] = v;
        }
        Self::new(d, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn min_eigenvalue(&self) -> T {
        self.min_eig
    }

    pub fn max_eigenvalue(&self) -> T {
        self.max_eig
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let d = self.dim;
        (0..d).map(|i| crate::scalar::dot(&self.data[i * d..(i + 1) * d], x)).collect()
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        crate::scalar::dot(x, &self.mul_vec(x))
    }

    /// `L z` for the Cholesky factor `A = L Lᵀ`; maps `N(0, I)` to `N(0, A)`.
    pub fn chol_mul(&self, z: &[T]) -> Vec<T> {
        let d = self.dim;
        (0..d).map(|i| crate::scalar::dot(&self.chol[i * d..i * d + i + 1], &z[..i + 1])).collect()
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> T {
        crate::scalar::norm(&self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_positive_definiteness() {
        assert!(SpdMatrix::new(2, vec![1.0, 0.5, 0.5, 1.0]).is_ok());
        assert!(matches!(SpdMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]), Err(Error::NotPositiveDefinite(_))));
        assert!(SpdMatrix::new(2, vec![1.0, 0.1, 0.2, 1.0]).is_err());
        assert!(SpdMatrix::<f64>::new(2, vec![1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn cholesky_reproduces_matrix() {
        let a = SpdMatrix::new(3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]).unwrap();
        // columns of L Lᵀ
        for j in 0..3 {
            // A e_j = L (Lᵀ e_j); Lᵀ e_j is row j of L
            let lt_e: Vec<f64> = (0..3).map(|k| if k <= j { a.chol[j * 3 + k] } else { 0.0 }).collect();
            let col = a.chol_mul(&lt_e);
            for (i, c) in col.iter().enumerate() {
                assert!((c - a.get(i, j)).abs() < 1e-14);
            }
        }
        assert!(a.min_eigenvalue() > 0.0 && a.max_eigenvalue() >= a.min_eigenvalue());
        assert!((a.quad_form(&[1.0, 0.0, 0.0]) - 4.0).abs() < 1e-15);
    }
}
