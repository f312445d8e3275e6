use super::spd::SpdMatrix;
use crate::error::{Error, Result};
use crate::kernels::special::norm_cdf;
use crate::scalar::{norm, Scalar};

/// Target distribution with Gaussian signal: `x₁ | y ~ N(yγ, σ₁² I)` and
/// spurious `x₂ ~ N(0, Σ₂)` independent of `(x₁, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTargetSpec<T> {
    pub gamma: Vec<T>,
    pub sigma1: T,
    pub sigma2: SpdMatrix<T>,
}

impl<T: Scalar> GaussianTargetSpec<T> {
    pub fn new(gamma: Vec<T>, sigma1: T, sigma2: SpdMatrix<T>) -> Result<Self> {
        if gamma.is_empty() || gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidInput("gamma must be a non-empty finite vector".into()));
        }
        if !(sigma1 > T::zero()) || !sigma1.is_finite() {
            return Err(Error::InvalidInput(format!("sigma1 must be positive, got {sigma1}")));
        }
        Ok(GaussianTargetSpec { gamma, sigma1, sigma2 })
    }

    /// Scalar signal `γ` with `Σ₂ = I_{d₂}`.
    pub fn scalar(gamma: T, sigma1: T, d2: usize) -> Result<Self> {
        Self::new(vec![gamma], sigma1, SpdMatrix::identity(d2))
    }

    pub fn d1(&self) -> usize {
        self.gamma.len()
    }

    pub fn d2(&self) -> usize {
        self.sigma2.dim()
    }

    /// `(σ̃_min, σ̃_max)`: square roots of the extreme eigenvalues of
    /// `Σ̃ = blockdiag(σ₁² I, Σ₂)`.
    pub fn tilde_sigma_range(&self) -> (T, T) {
        let lo = self.sigma1.min(self.sigma2.min_eigenvalue().sqrt());
        let hi = self.sigma1.max(self.sigma2.max_eigenvalue().sqrt());
        (lo, hi)
    }
}

/// Accuracy `Φ(‖γ‖/σ₁)` of the signal-only classifier `w = (γ/‖γ‖, 0)`,
/// the best achievable on this target.
pub fn bayes_accuracy<T: Scalar>(spec: &GaussianTargetSpec<T>) -> T {
    norm_cdf(norm(&spec.gamma) / spec.sigma1)
}
