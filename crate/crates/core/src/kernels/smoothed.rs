//! Surrogate losses and their Gaussian smoothing `g_σ(μ) = E[ℓ_exp(μ + σZ)]`.

use super::quadrature::legendre_rule;
use super::special::erfcx;
use crate::scalar::Scalar;

/// `ℓ_exp(t) = exp(-|t|)`.
#[inline]
pub fn loss_exp<T: Scalar>(t: T) -> T {
    (-t.abs()).exp()
}

/// Derivative of [`loss_exp`], with the value `0` at the kink `t = 0`.
#[inline]
pub fn dloss_exp<T: Scalar>(t: T) -> T {
    if t > T::zero() {
        -(-t).exp()
    } else if t < T::zero() {
        t.exp()
    } else {
        T::zero()
    }
}

/// Binary entropy, in nats, of `sigmoid(t)`.
///
/// Evaluated as `ln(1 + e^{-|t|}) + |t|·e^{-|t|}/(1 + e^{-|t|})`, which
/// underflows gracefully for large `|t|`.
pub fn loss_ent<T: Scalar>(t: T) -> T {
    let a = t.abs();
    let e = (-a).exp();
    e.ln_1p() + a * e / (T::one() + e)
}

/// `dℓ_ent/dt = -t·p(1-p)`, `p = sigmoid(t)`.
pub fn dloss_ent<T: Scalar>(t: T) -> T {
    let e = (-t.abs()).exp();
    let one_p = T::one() + e;
    -t * e / (one_p * one_p)
}

/// `e^a · erfc(u)` given `b = a - u²`, without overflow.
#[inline]
fn exp_erfc<T: Scalar>(a: T, u: T, b: T) -> T {
    if u >= T::zero() {
        b.exp() * erfcx(u)
    } else {
        a.exp() * super::special::erfc(u)
    }
}

/// The two scaled terms `(e^{σ²/2-μ} erfc(u₁), e^{σ²/2+μ} erfc(u₂))`.
fn terms<T: Scalar>(mu: T, sigma: T) -> (T, T) {
    let half = T::lit(0.5);
    let r2 = T::SQRT_2();
    let u1 = (sigma - mu / sigma) / r2;
    let u2 = (sigma + mu / sigma) / r2;
    let b = -(mu * mu) / (T::lit(2.0) * sigma * sigma);
    let s2 = half * sigma * sigma;
    (exp_erfc(s2 - mu, u1, b), exp_erfc(s2 + mu, u2, b))
}

/// Closed-form `g_σ(μ) = ½e^{σ²/2}[e^{-μ}erfc(u₁) + e^{μ}erfc(u₂)]`,
/// `u₁,₂ = (σ ∓ μ/σ)/√2`; `ℓ_exp(μ)` at `σ = 0`.
pub fn g_sigma<T: Scalar>(mu: T, sigma: T) -> T {
    debug_assert!(sigma >= T::zero());
    if sigma == T::zero() {
        return loss_exp(mu);
    }
    let (h1, h2) = terms(mu, sigma);
    T::lit(0.5) * (h1 + h2)
}

/// Closed-form `q_σ(μ) = ∂g_σ(μ)/∂σ = σ·g_σ(μ) - √(2/π)·e^{-μ²/2σ²}`.
///
/// At `σ = 0` returns the one-sided limit (`-√(2/π)` at `μ = 0`, else `0`).
pub fn q_sigma<T: Scalar>(mu: T, sigma: T) -> T {
    let c = (T::lit(2.0) / T::PI()).sqrt();
    if sigma == T::zero() {
        return if mu == T::zero() { -c } else { T::zero() };
    }
    sigma * g_sigma(mu, sigma) - c * (-(mu * mu) / (T::lit(2.0) * sigma * sigma)).exp()
}

/// Closed-form `∂g_σ(μ)/∂μ = ½e^{σ²/2}[e^{μ}erfc(u₂) - e^{-μ}erfc(u₁)]`.
pub fn dg_dmu<T: Scalar>(mu: T, sigma: T) -> T {
    if sigma == T::zero() {
        return dloss_exp(mu);
    }
    let (h1, h2) = terms(mu, sigma);
    T::lit(0.5) * (h2 - h1)
}

/// Evaluation strategy for [`SmoothedLoss`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    ClosedForm,
    /// Gauss–Legendre over `μ ± 12σ`, split at the kink of `ℓ_exp`.
    Quadrature,
}

/// The smoothed-loss pair `(g_σ, q_σ)` behind a selectable backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothedLoss {
    pub backend: Backend,
    /// Nodes per smooth piece for the quadrature backend.
    pub quadrature_nodes: usize,
}

impl Default for SmoothedLoss {
    fn default() -> Self {
        SmoothedLoss { backend: Backend::ClosedForm, quadrature_nodes: 96 }
    }
}

impl SmoothedLoss {
    pub fn closed_form() -> Self {
        Self::default()
    }

    pub fn quadrature(nodes: usize) -> Self {
        assert!(nodes >= 8, "quadrature backend needs at least 8 nodes");
        SmoothedLoss { backend: Backend::Quadrature, quadrature_nodes: nodes }
    }

    /// `g_σ(μ)`.
    pub fn g<T: Scalar>(&self, mu: T, sigma: T) -> T {
        match self.backend {
            Backend::ClosedForm => g_sigma(mu, sigma),
            Backend::Quadrature => self.expect(mu, sigma, |_| T::one()),
        }
    }

    /// `q_σ(μ)`; the quadrature backend differentiates the Gaussian density
    /// in σ (score weight `((t-μ)²/σ² - 1)/σ`).
    pub fn q<T: Scalar>(&self, mu: T, sigma: T) -> T {
        match self.backend {
            Backend::ClosedForm => q_sigma(mu, sigma),
            Backend::Quadrature => {
                if sigma == T::zero() {
                    return q_sigma(mu, sigma);
                }
                self.expect(mu, sigma, |z| (z * z - T::one()) / sigma)
            }
        }
    }

    /// `∂g_σ(μ)/∂μ`; quadrature uses the score weight `(t-μ)/σ²`.
    pub fn dg_dmu<T: Scalar>(&self, mu: T, sigma: T) -> T {
        match self.backend {
            Backend::ClosedForm => dg_dmu(mu, sigma),
            Backend::Quadrature => {
                if sigma == T::zero() {
                    return dloss_exp(mu);
                }
                self.expect(mu, sigma, |z| z / sigma)
            }
        }
    }

    /// `E[ℓ_exp(μ + σZ)·weight(Z)]`.
    fn expect<T: Scalar>(&self, mu: T, sigma: T, weight: impl Fn(T) -> T) -> T {
        if sigma == T::zero() {
            return loss_exp(mu) * weight(T::zero());
        }
        let rule = legendre_rule(self.quadrature_nodes);
        let span = T::lit(12.0) * sigma;
        let (lo, hi) = (mu - span, mu + span);
        let norm = T::one() / (sigma * (T::lit(2.0) * T::PI()).sqrt());
        let f = |t: T| {
            let z = (t - mu) / sigma;
            norm * (-(z * z) * T::lit(0.5)).exp() * loss_exp(t) * weight(z)
        };
        if lo < T::zero() && hi > T::zero() {
            rule.integrate(f, lo, T::zero()) + rule.integrate(f, T::zero(), hi)
        } else {
            rule.integrate(f, lo, hi)
        }
    }
}
