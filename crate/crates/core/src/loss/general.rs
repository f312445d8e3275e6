//! Population quantities for a general 1-d log-concave mixture signal, by
//! adaptive Gauss–Kronrod quadrature over each component's effective support.

use super::classifier::Classifier;
use crate::distributions::{MixtureSignalSpec, SpdMatrix};
use crate::error::{Error, Result};
use crate::kernels::smoothed::{dg_dmu, g_sigma, q_sigma};
use crate::kernels::special::norm_cdf_f64;
use crate::scalar::Scalar;

/// Absolute tolerance of the component integrals for integrands of order one.
pub const QUAD_TOL: f64 = 1e-11;

fn check_dims<T: Scalar>(w: &Classifier<T>, sigma2: &SpdMatrix<T>) -> Result<()> {
    if w.d1() != 1 {
        return Err(Error::DimensionMismatch { what: "d1 for the general-signal path", expected: 1, got: w.d1() });
    }
    if w.d2() != sigma2.dim() {
        return Err(Error::DimensionMismatch { what: "w2 vs Sigma2", expected: sigma2.dim(), got: w.d2() });
    }
    Ok(())
}

/// `QUAD_TOL` scaled down to the magnitude of the integrands, estimated at
/// the component modes, so tiny losses keep their relative accuracy.
fn tol_for(signal: &MixtureSignalSpec, w1: f64, s: f64) -> f64 {
    let scale: f64 = signal
        .components
        .iter()
        .zip(&signal.weights)
        .map(|(c, &t)| {
            let mu = w1 * c.mode();
            let spike = if s > 0.0 { (-(mu * mu) / (2.0 * s * s)).exp() } else { 0.0 };
            t * (g_sigma(mu, s) + spike)
        })
        .sum();
    QUAD_TOL * scale.clamp(1e-290, 1.0)
}

fn sigma_of<T: Scalar>(w: &Classifier<T>, sigma2: &SpdMatrix<T>) -> f64 {
    sigma2.quad_form(&w.w2).max(T::zero()).sqrt().f64()
}

/// `L(w) = Σ_k τ_k ∫ p_k(x) g_σ(w₁x) dx`.
pub fn population_loss_general<T: Scalar>(
    w: &Classifier<T>,
    signal: &MixtureSignalSpec,
    sigma2: &SpdMatrix<T>,
) -> Result<T> {
    check_dims(w, sigma2)?;
    let (w1, s) = (w.w1[0].f64(), sigma_of(w, sigma2));
    if w1 == 0.0 {
        return Ok(T::lit(g_sigma(0.0, s)));
    }
    signal.expect(|x| g_sigma(w1 * x, s), &[0.0], tol_for(signal, w1, s)).map(T::lit)
}

/// `∂L/∂σ = Σ_k τ_k ∫ p_k(x) q_σ(w₁x) dx`, `σ = √(w₂ᵀΣ₂w₂)`.
pub fn dl_dsigma_general<T: Scalar>(w: &Classifier<T>, signal: &MixtureSignalSpec, sigma2: &SpdMatrix<T>) -> Result<T> {
    check_dims(w, sigma2)?;
    let (w1, s) = (w.w1[0].f64(), sigma_of(w, sigma2));
    if w1 == 0.0 {
        return Ok(T::lit(q_sigma(0.0, s)));
    }
    signal.expect(|x| q_sigma(w1 * x, s), &[0.0], tol_for(signal, w1, s)).map(T::lit)
}

/// Concatenated gradient `[∂L/∂w₁, ∂L/∂σ · Σ₂w₂/σ]`.
pub fn population_grad_general<T: Scalar>(
    w: &Classifier<T>,
    signal: &MixtureSignalSpec,
    sigma2: &SpdMatrix<T>,
) -> Result<Vec<T>> {
    check_dims(w, sigma2)?;
    let (w1, s) = (w.w1[0].f64(), sigma_of(w, sigma2));
    let d1 = signal.expect(|x| x * dg_dmu(w1 * x, s), &[0.0], tol_for(signal, w1, s))?;
    let mut out = vec![T::lit(d1)];
    if s > 0.0 {
        let c = dl_dsigma_general(w, signal, sigma2)? / T::lit(s);
        out.extend(sigma2.mul_vec(&w.w2).into_iter().map(|v| c * v));
    } else {
        out.extend(std::iter::repeat(T::zero()).take(w.d2()));
    }
    Ok(out)
}

/// Density of `μ = w₁x₁` at zero: `Σ_k τ_k p_k(0)/|w₁|`.
pub fn density_at_zero<T: Scalar>(w: &Classifier<T>, signal: &MixtureSignalSpec) -> Result<T> {
    let w1 = w.w1.first().copied().unwrap_or_else(T::zero).f64().abs();
    if w.d1() != 1 || w1 == 0.0 {
        return Err(Error::InvalidInput("density of w1*x1 needs d1 = 1 and w1 != 0".into()));
    }
    let p: f64 = signal.components.iter().zip(&signal.weights).map(|(c, &t)| t * c.density(0.0)).sum();
    Ok(T::lit(p / w1))
}

/// Exact accuracy `Σ_k τ_k ∫ p_k(x) Φ(y_k w₁x/σ) dx`.
pub fn population_accuracy_general<T: Scalar>(
    w: &Classifier<T>,
    signal: &MixtureSignalSpec,
    sigma2: &SpdMatrix<T>,
) -> Result<T> {
    check_dims(w, sigma2)?;
    let (w1, s) = (w.w1[0].f64(), sigma_of(w, sigma2));
    let mut acc = 0.0;
    for (c, &t) in signal.components.iter().zip(&signal.weights) {
        let y = c.class_sign as f64;
        let f = |x: f64| {
            let m = y * w1 * x;
            if s > 0.0 {
                norm_cdf_f64(m / s)
            } else if m > 0.0 {
                1.0
            } else if m < 0.0 {
                0.0
            } else {
                0.5
            }
        };
        acc += t * c.expect(f, &[0.0], QUAD_TOL)?;
    }
    Ok(T::lit(acc))
}
