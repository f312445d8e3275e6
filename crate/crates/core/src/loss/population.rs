//! Exact population quantities for Gaussian signal.
//!
//! With `μ = γᵀw₁` and `σ̃² = σ₁²‖w₁‖² + w₂ᵀΣ₂w₂`, the margin `wᵀx` given
//! `y` is `N(yμ, σ̃²)`, so `L(w) = g_σ̃(μ)`.

use super::classifier::Classifier;
use crate::distributions::GaussianTargetSpec;
use crate::kernels::smoothed::{dg_dmu, g_sigma, q_sigma};
use crate::kernels::special::norm_cdf;
use crate::kernels::threshold::r_threshold;
use crate::scalar::{dot, Scalar};

/// `σ = √(w₂ᵀΣ₂w₂)` and `σ̃ = √(σ₁²‖w₁‖² + σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaDecomposition<T> {
    pub sigma: T,
    pub sigma_tilde: T,
}

pub fn sigma_decomposition<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>) -> SigmaDecomposition<T> {
    let s2 = spec.sigma2.quad_form(&w.w2).max(T::zero());
    let s1 = spec.sigma1 * spec.sigma1 * dot(&w.w1, &w.w1);
    SigmaDecomposition { sigma: s2.sqrt(), sigma_tilde: (s1 + s2).sqrt() }
}

/// Signal margin `μ = γᵀw₁`.
pub fn signal_margin<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>) -> T {
    dot(&w.w1, &spec.gamma)
}

/// `L(w) = E[ℓ_exp(wᵀx)] = g_σ̃(γᵀw₁)`.
pub fn population_loss_gaussian<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>) -> T {
    let s = sigma_decomposition(w, spec);
    g_sigma(signal_margin(w, spec), s.sigma_tilde)
}

/// `∇L(w)` as a concatenated `[∇_{w₁}, ∇_{w₂}]` vector:
/// `∇_{w₁} = g′γ + q·σ₁²w₁/σ̃`, `∇_{w₂} = q·Σ₂w₂/σ̃`, with `g′ = ∂g/∂μ`
/// and `q = q_σ̃(μ)`. The σ̃-terms vanish when `σ̃ = 0`.
pub fn population_grad_gaussian<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>) -> Vec<T> {
    let s = sigma_decomposition(w, spec);
    let mu = signal_margin(w, spec);
    let gp = dg_dmu(mu, s.sigma_tilde);
    let mut out = Vec::with_capacity(w.d1() + w.d2());
    if s.sigma_tilde > T::zero() {
        let c = q_sigma(mu, s.sigma_tilde) / s.sigma_tilde;
        let s1sq = spec.sigma1 * spec.sigma1;
        out.extend(w.w1.iter().zip(&spec.gamma).map(|(&wi, &gi)| gp * gi + c * s1sq * wi));
        out.extend(spec.sigma2.mul_vec(&w.w2).into_iter().map(|v| c * v));
    } else {
        out.extend(spec.gamma.iter().map(|&gi| gp * gi));
        out.extend(std::iter::repeat(T::zero()).take(w.d2()));
    }
    out
}

/// `∂L/∂σ` at fixed `w₁`, where `σ = √(w₂ᵀΣ₂w₂)`: `q_σ̃(μ)·σ/σ̃`.
pub fn dl_dsigma_gaussian<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>) -> T {
    let s = sigma_decomposition(w, spec);
    if s.sigma_tilde == T::zero() {
        return T::zero();
    }
    q_sigma(signal_margin(w, spec), s.sigma_tilde) * s.sigma / s.sigma_tilde
}

/// `∂g_σ(μ)/∂σ` at the point's own `(μ, σ̃)`; the quantity whose sign the
/// theory tracks when `w₁` is held fixed and the total noise level moves.
pub fn q_at<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>) -> T {
    let s = sigma_decomposition(w, spec);
    q_sigma(signal_margin(w, spec), s.sigma_tilde)
}

/// Margin `γᵀw₁ - r(R·σ̃_max)` of the safe set
/// `S = {w : γᵀw₁ ≥ r(R·σ̃_max), ‖w‖ ≤ R}`, and membership.
pub fn safe_set_margin<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>, radius: T) -> (bool, T) {
    let a = r_threshold(radius * spec.tilde_sigma_range().1);
    let margin = signal_margin(w, spec) - a;
    let slack = T::lit(1e-12).max(radius * T::epsilon() * T::lit(8.0));
    (margin >= T::zero() && w.norm() <= radius + slack, margin)
}

/// Exact accuracy `P(y·wᵀx > 0) = Φ(μ/σ̃)`.
pub fn population_accuracy_gaussian<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>) -> T {
    let s = sigma_decomposition(w, spec);
    let mu = signal_margin(w, spec);
    if s.sigma_tilde == T::zero() {
        return if mu > T::zero() {
            T::one()
        } else if mu < T::zero() {
            T::zero()
        } else {
            T::lit(0.5)
        };
    }
    norm_cdf(mu / s.sigma_tilde)
}

/// Population gradient of the pseudo-label loss `E[ℓ_exp(yᵗ·wᵀx)]` with
/// labels `yᵗ = sign(wᵀx)` frozen at `w` itself.
///
/// Computed by a separate route from [`population_grad_gaussian`]: for each
/// class, `E[ℓ′(t)x] = γ̄·E[ℓ′(t)] + Σ̃w·E[ℓ″(t)]` by Stein's identity, where
/// `ℓ″ = ℓ_exp - 2δ₀` in the distributional sense, giving
/// `γ̄·g′(μ) + Σ̃w·(g_s(μ) - 2φ_s(μ))` with `φ_s` the `N(0, s²)` density.
pub fn pseudo_label_grad_gaussian<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>) -> Vec<T> {
    let s = sigma_decomposition(w, spec).sigma_tilde;
    let mu = signal_margin(w, spec);
    let gp = dg_dmu(mu, s);
    let mut out = Vec::with_capacity(w.d1() + w.d2());
    if s > T::zero() {
        let two_pi = T::lit(2.0) * T::PI();
        let phi = (-(mu * mu) / (T::lit(2.0) * s * s)).exp() / (s * two_pi.sqrt());
        let c = g_sigma(mu, s) - T::lit(2.0) * phi;
        let s1sq = spec.sigma1 * spec.sigma1;
        out.extend(w.w1.iter().zip(&spec.gamma).map(|(&wi, &gi)| gi * gp + c * s1sq * wi));
        out.extend(spec.sigma2.mul_vec(&w.w2).into_iter().map(|v| c * v));
    } else {
        out.extend(spec.gamma.iter().map(|&gi| gi * gp));
        out.extend(std::iter::repeat(T::zero()).take(w.d2()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_target, SpdMatrix};
    use crate::kernels::smoothed::loss_exp;
    use proptest::prelude::*;

    fn spec() -> GaussianTargetSpec<f64> {
        GaussianTargetSpec::new(vec![2.0], 1.0, SpdMatrix::new(2, vec![1.0, 0.3, 0.3, 0.6]).unwrap()).unwrap()
    }

    fn loss_at(v: &[f64], d1: usize, s: &GaussianTargetSpec<f64>) -> f64 {
        let w = Classifier { w1: v[..d1].to_vec(), w2: v[d1..].to_vec(), radius: 10.0 };
        population_loss_gaussian(&w, s)
    }

    #[test]
    fn signal_only_classifier() {
        let s = GaussianTargetSpec::scalar(2.0, 1.0, 1).unwrap();
        let w = Classifier::<f64>::new(vec![1.0], vec![0.0], 1.0).unwrap();
        assert_eq!(population_loss_gaussian(&w, &s), g_sigma(2.0, 1.0));
        let g = population_grad_gaussian(&w, &s);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn matches_monte_carlo() {
        let s = spec();
        let w = Classifier::<f64>::new(vec![0.7], vec![0.4, -0.3], 1.0).unwrap();
        let n = 1_000_000;
        let b = sample_target(&s.clone().into(), n, 17).unwrap();
        let vals: Vec<f64> = (0..n).map(|i| loss_exp(w.margin(b.x1_row(i), b.x2_row(i)))).collect();
        let m = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        let exact = population_loss_gaussian(&w, &s);
        assert!((m - exact).abs() < 3.0 * (var / n as f64).sqrt(), "{m} vs {exact}");
    }

    #[test]
    fn spurious_scaling_reduces_loss_without_signal() {
        let s = spec();
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let a = 0.05 * k as f64;
            let w = Classifier::<f64>::new(vec![0.0], vec![a * 0.6, a * 0.8], 1.0).unwrap();
            let l = population_loss_gaussian(&w, &s);
            assert!(l < prev);
            prev = l;
            assert!(dl_dsigma_gaussian(&w, &s) < 0.0);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let s = GaussianTargetSpec::new(vec![1.2, -0.4], 0.7, SpdMatrix::new(2, vec![1.0, 0.3, 0.3, 0.6]).unwrap())
            .unwrap();
        let w = Classifier::<f64>::new(vec![0.5, 0.1], vec![0.3, -0.6], 1.0).unwrap();
        let g = population_grad_gaussian(&w, &s);
        let v = w.concat();
        for k in 0..4 {
            let h = 1e-6;
            let mut p = v.clone();
            let mut m = v.clone();
            p[k] += h;
            m[k] -= h;
            let fd = (loss_at(&p, 2, &s) - loss_at(&m, 2, &s)) / (2.0 * h);
            assert!((g[k] - fd).abs() < 1e-8 * g[k].abs().max(1.0), "coord {k}: {} vs {fd}", g[k]);
        }
    }

    #[test]
    fn zero_classifier_gradient_is_finite() {
        let s = spec();
        let w = Classifier::<f64>::new(vec![0.0], vec![0.0, 0.0], 1.0).unwrap();
        let g = population_grad_gaussian(&w, &s);
        assert!(g.iter().all(|v| v.is_finite()));
        assert_eq!(&g[1..], &[0.0, 0.0]);
    }

    #[test]
    fn pseudo_gradient_equals_entropy_gradient() {
        let s = spec();
        for (w1, w2) in [(0.9, [0.3, -0.1]), (0.0, [0.5, 0.5]), (-0.4, [0.1, 0.8])] {
            let w = Classifier::new(vec![w1], w2.to_vec(), 1.0).unwrap();
            let a = population_grad_gaussian(&w, &s);
            let b = pseudo_label_grad_gaussian(&w, &s);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn accuracy_formula() {
        let s = GaussianTargetSpec::scalar(2.0, 1.0, 1).unwrap();
        let w = Classifier::<f64>::new(vec![1.0], vec![0.0], 1.0).unwrap();
        assert!((population_accuracy_gaussian(&w, &s) - 0.977_249_868_051_820_8).abs() < 1e-15);
        let w = Classifier::<f64>::new(vec![0.0], vec![0.0], 1.0).unwrap();
        assert_eq!(population_accuracy_gaussian(&w, &s), 0.5);
    }

    proptest! {
        #[test]
        fn sigma_decomposition_invariants(w1 in -1.0f64..1.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let s = spec();
            let w = Classifier { w1: vec![w1], w2: vec![a, b], radius: 2.0 };
            let d = sigma_decomposition(&w, &s);
            prop_assert!(d.sigma <= d.sigma_tilde);
            prop_assert_eq!(d.sigma == 0.0, a == 0.0 && b == 0.0);
        }
    }
}
