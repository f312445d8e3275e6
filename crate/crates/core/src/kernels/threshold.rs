//! Margin threshold `r(σ)` and the general-case constants `κ̃`, `p*`, `κ`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Breakpoint `4√2/√π` of [`r_threshold`].
pub fn r_breakpoint<T: Scalar>() -> T {
    T::lit(4.0) * T::SQRT_2() / T::PI().sqrt()
}

/// Both branches of `r` at `sigma`: `(σ² + σ√(2 ln(4√2/(√π σ))), 2σ²)`.
///
/// The first branch is only real for `σ ≤ 4√2/√π`; beyond it the logarithm is
/// negative and the value is NaN.
pub fn r_branches<T: Scalar>(sigma: T) -> (T, T) {
    let two = T::lit(2.0);
    let log_term = (r_breakpoint::<T>() / sigma).ln();
    let left = sigma * sigma + sigma * (two * log_term).sqrt();
    (left, two * sigma * sigma)
}

/// Margin threshold `r(σ)` above which `q_σ(μ) ≥ σℓ_exp(μ)/4`.
///
/// Piecewise, with a jump of `σ²` at the breakpoint: the left branch equals
/// `σ²` there while the right branch is `2σ²`.
pub fn r_threshold<T: Scalar>(sigma: T) -> T {
    let (left, right) = r_branches(sigma);
    if sigma <= r_breakpoint() {
        left
    } else {
        right
    }
}

/// `κ̃(ρ, ν)` and `p*(ρ, ν)`, kept in log space as well since both underflow
/// quickly as `ρ/ν` grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConstants<T> {
    pub rho: T,
    pub nu: T,
    pub kappa_tilde: T,
    pub p_star: T,
    pub ln_kappa_tilde: T,
    pub ln_p_star: T,
    /// Logs of the two terms inside the `κ̃` minimum.
    pub ln_kappa_branches: (T, T),
}

fn ln_p_star(rho: f64, nu: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let lead = (nu.sqrt() / (2.0 * pi.sqrt())).ln();
    let inner = 0.5 * (nu / rho).ln() + (8.0 * rho / nu) * (pi.sqrt() / (44.0 * (2.0 * rho).sqrt())).ln();
    lead + inner.min(0.0)
}

fn ln_kappa_terms(rho: f64, nu: f64) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let e = nu / (4.0 * rho);
    let t1 = (pi.sqrt() / (4.0 * rho.sqrt())).ln() + (1.0 - e) * ln_p_star(rho, nu) + e * (nu / (2.0 * pi.sqrt())).ln();
    let t2 = (nu.sqrt() / (8.0 * (2.0 * pi).sqrt() * (rho.sqrt() + 2f64.sqrt()))).ln()
        - ((rho.sqrt() + 4.0) / (2.0 * nu.sqrt())).powi(2);
    (t1, t2)
}

fn ln_kappa_tilde(rho: f64, nu: f64) -> f64 {
    let (a, b) = ln_kappa_terms(rho, nu);
    a.min(b)
}

/// Evaluates `p*` and `κ̃` exactly as defined, for log-smoothness `rho` and
/// log-concavity `nu`.
pub fn kappa_constants<T: Scalar>(rho: T, nu: T) -> Result<ThresholdConstants<T>> {
    let (r, n) = (rho.f64(), nu.f64());
    if !(n > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("need finite rho >= nu > 0, got rho={r}, nu={n}")));
    }
    if r < n {
        return Err(Error::SmoothnessBelowConcavity { rho: r, nu: n });
    }
    let lp = ln_p_star(r, n);
    let (t1, t2) = ln_kappa_terms(r, n);
    let lk = t1.min(t2);
    Ok(ThresholdConstants {
        rho,
        nu,
        kappa_tilde: T::lit(lk.exp()),
        p_star: T::lit(lp.exp()),
        ln_kappa_tilde: T::lit(lk),
        ln_p_star: T::lit(lp),
        ln_kappa_branches: (T::lit(t1), T::lit(t2)),
    })
}

/// `κ(β, α) = min_{a∈[1,4]} κ̃(aβ, aα)` with its minimiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa<T> {
    pub a_star: T,
    pub kappa: T,
    pub ln_kappa: T,
}

/// Minimises `ln κ̃(aβ, aα)` over `a ∈ [1, 4]`: 256-point grid, then
/// golden-section refinement around the best grid point (tolerance 1e-10).
pub fn kappa<T: Scalar>(beta: T, alpha: T) -> Result<Kappa<T>> {
    kappa_constants(beta, alpha)?;
    let (b, al) = (beta.f64(), alpha.f64());
    let f = |a: f64| ln_kappa_tilde(a * b, a * al);
    let grid: Vec<f64> = (0..256).map(|i| 1.0 + 3.0 * i as f64 / 255.0).collect();
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for (i, &a) in grid.iter().enumerate() {
        let v = f(a);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(255)];
    let (a_ref, v_ref) = golden_section(f, lo, hi, 1e-10);
    let (a_star, ln_k) = if v_ref < best { (a_ref, v_ref) } else { (grid[best_i], best) };
    Ok(Kappa { a_star: T::lit(a_star), kappa: T::lit(ln_k.exp()), ln_kappa: T::lit(ln_k) })
}

/// Golden-section minimisation on `[lo, hi]`; returns `(argmin, min)`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let candidates = [(lo, f(lo)), (hi, f(hi)), (x1, f1), (x2, f2)];
    candidates.into_iter().fold((lo, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn r_right_branch() {
        assert_eq!(r_threshold(4.0f64), 32.0);
    }

    #[test]
    fn r_left_branch_value() {
        let r: f64 = r_threshold(0.1);
        let want = 0.01 + 0.1 * (2.0 * (40.0 * 2f64.sqrt() / std::f64::consts::PI.sqrt()).ln()).sqrt();
        assert!((r - want).abs() < 1e-15);
        assert!((r - 0.273_176_294_580_997_9).abs() < 1e-15);
    }

    #[test]
    fn r_jump_at_breakpoint() {
        let b: f64 = r_breakpoint();
        assert!((b - 3.191_538_243_211_461_4).abs() < 1e-15);
        let (left, right) = r_branches(b);
        assert!((left - b * b).abs() < 1e-12);
        assert!((right - 2.0 * b * b).abs() < 1e-12);
        // jump of σ² = 32/π
        assert!((right - left - 32.0 / std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(r_threshold(b), left);
    }

    #[test]
    fn kappa_tilde_reference_values() {
        // 40-digit evaluations of the defining formulas
        let c = kappa_constants(1.0f64, 1.0).unwrap();
        assert!(((c.p_star - 1.222_512_094_109_031_8e-13) / c.p_star).abs() < 1e-12);
        assert!(((c.kappa_tilde - 6.676_572_744_012_310_4e-11) / c.kappa_tilde).abs() < 1e-12);
        let (t1, t2) = c.ln_kappa_branches;
        assert!((t2 - 3.987_529_248_241_182e-5f64.ln()).abs() < 1e-12);
        assert_eq!(c.ln_kappa_tilde, t1.min(t2));

        let c = kappa_constants(3.0f64, 1.0).unwrap();
        assert!(((c.kappa_tilde - 2.469_987_601_690_585_4e-41) / c.kappa_tilde).abs() < 1e-11);
        assert!(((c.p_star - 2.494_328_636_276_296_3e-44) / c.p_star).abs() < 1e-11);
    }

    #[test]
    fn rejects_rho_below_nu() {
        assert!(matches!(kappa_constants(0.5f64, 1.0), Err(Error::SmoothnessBelowConcavity { .. })));
        assert!(kappa_constants(1.0f64, 0.0).is_err());
    }

    #[test]
    fn kappa_tilde_non_increasing_in_rho() {
        for &nu in &[0.5, 1.0, 3.0] {
            let mut prev = f64::INFINITY;
            for i in 0..=200 {
                let rho = nu * (1.0 + 9.0 * i as f64 / 200.0);
                let c = kappa_constants::<f64>(rho, nu).unwrap();
                assert!(c.ln_kappa_tilde <= prev + 1e-12);
                assert!(c.ln_kappa_tilde.is_finite() && c.ln_p_star.is_finite());
                prev = c.ln_kappa_tilde;
            }
        }
    }

    #[test]
    fn kappa_min_over_scale() {
        let k = kappa(1.0f64, 1.0).unwrap();
        assert!((k.ln_kappa - -27.415_427_517_540_724).abs() < 1e-9);
        assert!((k.a_star - 4.0).abs() < 1e-9);
        let base = kappa_constants(1.0f64, 1.0).unwrap();
        assert!(k.ln_kappa <= base.ln_kappa_tilde);
        let k3 = kappa(3.0f64, 1.0).unwrap();
        assert!((k3.ln_kappa - -108.693_251_388_959_19).abs() < 1e-9);
    }

    #[test]
    fn golden_section_finds_interior_minimum() {
        let (x, v) = golden_section(|x| (x - 1.3).powi(2) + 2.0, 0.0, 4.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-15);
    }
}
