//! Grid certificates for the scalar kernels.

use super::report::{VerificationReport, Witness};
use crate::distributions::{GaussianTargetSpec, SpdMatrix};
use crate::error::{Error, Result};
use crate::kernels::quadrature::integrate_adaptive;
use crate::kernels::smoothed::{g_sigma, loss_ent, loss_exp, q_sigma, SmoothedLoss};
use crate::kernels::special::erf_f64;
use crate::kernels::threshold::r_threshold;
use crate::loss::{population_grad_gaussian, population_loss_gaussian, random_w_grid, Classifier};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Numerical slack of the grid certificates.
pub const GRID_SLACK: f64 = 1e-10;

/// `start, start + step, …` up to `end` inclusive (with a half-step guard).
pub fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

/// `σ ∈ {0.05, 0.10, …, 5}`.
pub fn default_sigma_grid() -> Vec<f64> {
    (1..=100).map(|i| 0.05 * i as f64).collect()
}

/// `μ ∈ [-20, 20]`, step 0.05.
pub fn default_mu_grid() -> Vec<f64> {
    (-400..=400).map(|i| 0.05 * i as f64).collect()
}

/// `q_σ(μ) ≥ σ·ℓ_exp(μ)/4` for every `σ` in `sigma_grid` and
/// `μ ∈ [r(σ), r(σ) + mu_extent]` with step `mu_step`.
pub fn verify_q_threshold(sigma_grid: &[f64], mu_extent: f64, mu_step: f64) -> Result<VerificationReport> {
    if sigma_grid.is_empty() || !(mu_extent >= 0.0) || !(mu_step > 0.0) {
        return Err(Error::InvalidInput("q-threshold grids must be non-empty with positive step".into()));
    }
    let witnesses: Vec<Witness> = sigma_grid
        .par_iter()
        .flat_map_iter(|&s| {
            let r = r_threshold(s);
            grid(0.0, mu_extent, mu_step).into_iter().map(move |d| {
                let mu = r + d;
                Witness::at_least("q>=sigma*l/4", vec![s, mu], q_sigma(mu, s), 0.25 * s * loss_exp(mu))
            })
        })
        .collect();
    Ok(VerificationReport::from_witnesses("q_threshold", GRID_SLACK, witnesses))
}

/// Positive root of `μ ↦ q_σ(μ)`, by bisection on `[0, r(σ) + 1]`.
pub fn q_root(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    let (mut lo, mut hi) = (0.0, r_threshold(sigma) + 1.0);
    if !(q_sigma(lo, sigma) < 0.0 && q_sigma(hi, sigma) > 0.0) {
        return Err(Error::InvalidInput(format!("no sign change of q on [0, r+1] at sigma={sigma}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_sigma(mid, sigma) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of `q_σ` lies below `r(σ)` on every grid point.
pub fn verify_q_root_below_r(sigma_grid: &[f64]) -> Result<VerificationReport> {
    let mut ws = Vec::with_capacity(sigma_grid.len());
    for &s in sigma_grid {
        ws.push(Witness::at_most("root<=r", vec![s], q_root(s)?, r_threshold(s)));
    }
    Ok(VerificationReport::from_witnesses("q_root_below_r", 0.0, ws))
}

/// `g ≥ ℓ/4` for `σ ≤ 1`, `g ≤ 2ℓ` for `σ ≤ 1/2`, and
/// `q ≥ -√(2/π)e^{-μ²/2σ²}`, over `sigma_grid × mu_grid`.
pub fn verify_kernel_bounds(sigma_grid: &[f64], mu_grid: &[f64]) -> VerificationReport {
    let c = (2.0 / PI).sqrt();
    let witnesses: Vec<Witness> = sigma_grid
        .par_iter()
        .flat_map_iter(|&s| {
            mu_grid.iter().flat_map(move |&mu| {
                let (g, l) = (g_sigma(mu, s), loss_exp(mu));
                let mut v = vec![Witness::at_least(
                    "q>=-sqrt(2/pi)exp(-mu^2/2s^2)",
                    vec![s, mu],
                    q_sigma(mu, s),
                    -c * (-(mu * mu) / (2.0 * s * s)).exp(),
                )];
                if s <= 1.0 {
                    v.push(Witness::at_least("g>=l/4", vec![s, mu], g, 0.25 * l));
                }
                if s <= 0.5 {
                    v.push(Witness::at_most("g<=2l", vec![s, mu], g, 2.0 * l));
                }
                v
            })
        })
        .collect();
    VerificationReport::from_witnesses("kernel_bounds", GRID_SLACK, witnesses)
}

/// Closed-form `g_σ` vs the `nodes`-node quadrature backend, absolute.
pub fn verify_backend_agreement(sigma_grid: &[f64], mu_grid: &[f64], nodes: usize, tol: f64) -> VerificationReport {
    let quad = SmoothedLoss::quadrature(nodes);
    let witnesses: Vec<Witness> = sigma_grid
        .par_iter()
        .flat_map_iter(|&s| {
            mu_grid.iter().map(move |&mu| {
                Witness::at_most("|g_closed-g_quad|", vec![s, mu], (g_sigma(mu, s) - quad.g(mu, s)).abs(), tol)
            })
        })
        .collect();
    VerificationReport::from_witnesses("backend_agreement", 0.0, witnesses)
}

/// `q_σ(μ)` vs `(g_{σ+h}(μ) - g_{σ-h}(μ))/2h`, absolute, `h = 1e-5`.
pub fn verify_q_finite_difference(sigma_grid: &[f64], mu_grid: &[f64], tol: f64) -> VerificationReport {
    let h = 1e-5;
    let witnesses: Vec<Witness> = sigma_grid
        .par_iter()
        .flat_map_iter(|&s| {
            mu_grid.iter().map(move |&mu| {
                let fd = (g_sigma(mu, s + h) - g_sigma(mu, s - h)) / (2.0 * h);
                Witness::at_most("|q-fd|", vec![s, mu], (q_sigma(mu, s) - fd).abs(), tol)
            })
        })
        .collect();
    VerificationReport::from_witnesses("q_finite_difference", 0.0, witnesses)
}

/// Analytic population gradient vs central differences (`h = 1e-6`),
/// `‖∇ - ∇_fd‖/‖∇‖`, on `count` classifiers drawn uniformly on the unit
/// sphere for a fixed non-isotropic Gaussian target.
pub fn verify_gradient_finite_difference(count: usize, seed: u64, tol: f64) -> VerificationReport {
    let sigma2 = SpdMatrix::new(3, vec![1.0, 0.3, 0.0, 0.3, 0.8, 0.1, 0.0, 0.1, 1.5]).expect("SPD");
    let spec = GaussianTargetSpec::new(vec![1.5, -0.7], 1.2, sigma2).expect("valid spec");
    let h = 1e-6;
    let witnesses: Vec<Witness> = random_w_grid::<f64>(2, 3, 1.0, count, seed)
        .into_iter()
        .map(|w| {
            let g = population_grad_gaussian(&w, &spec);
            let v = w.concat();
            let fd: Vec<f64> = (0..v.len())
                .map(|k| {
                    let mut p = v.clone();
                    let mut m = v.clone();
                    p[k] += h;
                    m[k] -= h;
                    let at = |x: &[f64]| Classifier { w1: x[..2].to_vec(), w2: x[2..].to_vec(), radius: 2.0 };
                    (population_loss_gaussian(&at(&p), &spec) - population_loss_gaussian(&at(&m), &spec)) / (2.0 * h)
                })
                .collect();
            let num = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let den = g.iter().map(|a| a * a).sum::<f64>().sqrt();
            Witness::at_most("relative fd error", v, num / den, tol)
        })
        .collect();
    VerificationReport::from_witnesses("gradient_finite_difference", 0.0, witnesses)
}

/// `∫_ℝ e^{ax-bx²}dx = √(π/b)·e^{a²/4b}` and
/// `∫_0^∞ e^{ax-bx²}dx = √π·e^{a²/4b}(1 + erf(a/2√b))/(2√b)`, each against
/// adaptive quadrature, relative error, over `(a, b) ∈ {-2,0,2}×{0.5,1,2}`.
///
/// Notes record `max (printed full-line form)/(true value)` where the printed
/// form is `√(2π)e^{a²/2b}/√b`.
pub fn verify_integral_identities(tol: f64) -> Result<VerificationReport> {
    let mut ws = Vec::new();
    let mut worst_printed: f64 = 0.0;
    for a in [-2.0f64, 0.0, 2.0] {
        for b in [0.5f64, 1.0, 2.0] {
            let f = |x: f64| (a * x - b * x * x).exp();
            let ext = 40.0 + a.abs() / b;
            let full = integrate_adaptive(f, -ext, 0.0, 1e-14)? + integrate_adaptive(f, 0.0, ext, 1e-14)?;
            let half = integrate_adaptive(f, 0.0, ext, 1e-14)?;
            let full_cf = (PI / b).sqrt() * (a * a / (4.0 * b)).exp();
            let half_cf =
                PI.sqrt() * (a * a / (4.0 * b)).exp() * (1.0 + erf_f64(a / (2.0 * b.sqrt()))) / (2.0 * b.sqrt());
            ws.push(Witness::at_most("full line", vec![a, b], ((full - full_cf) / full).abs(), tol));
            ws.push(Witness::at_most("half line", vec![a, b], ((half - half_cf) / half).abs(), tol));
            let printed = (2.0 * PI).sqrt() * (a * a / (2.0 * b)).exp() / b.sqrt();
            worst_printed = worst_printed.max(printed / full);
        }
    }
    Ok(VerificationReport::from_witnesses("integral_identities", 0.0, ws)
        .with_note("printed_over_true_max", worst_printed))
}

/// `ℓ_ent(t)/ℓ_exp(t)` on `t ∈ {-extent, …, extent}`.
pub fn surrogate_ratio_table(extent: f64, step: f64) -> Vec<(f64, f64)> {
    grid(-extent, extent, step).into_iter().map(|t| (t, loss_ent(t) / loss_exp(t))).collect()
}

/// Ratio table within `[lo, hi]`.
pub fn verify_surrogate_ratio(extent: f64, step: f64, lo: f64, hi: f64) -> VerificationReport {
    let ws = surrogate_ratio_table(extent, step).into_iter().flat_map(|(t, r)| {
        [Witness::at_least("ratio>=lo", vec![t], r, lo), Witness::at_most("ratio<=hi", vec![t], r, hi)]
    });
    VerificationReport::from_witnesses("surrogate_ratio", 0.0, ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::report::Status;

    #[test]
    fn grids_have_expected_sizes() {
        assert_eq!(default_sigma_grid().len(), 100);
        assert!((default_sigma_grid()[99] - 5.0).abs() < 1e-12);
        assert_eq!(grid(0.0, 20.0, 0.05).len(), 401);
        assert_eq!(default_mu_grid().len(), 801);
    }

    #[test]
    fn q_threshold_default_grid_passes() {
        let r = verify_q_threshold(&default_sigma_grid(), 20.0, 0.05).unwrap();
        assert_eq!(r.status, Status::Pass, "{:?}", r.worst());
        assert_eq!(r.evaluated, 100 * 401);
    }

    #[test]
    fn below_root_bound_is_violated() {
        for s in [0.3, 1.0, 2.5] {
            let root = q_root(s).unwrap();
            assert!(q_sigma(root, s).abs() < 1e-12);
            let mu = root - 1e-3;
            assert!(q_sigma(mu, s) < 0.25 * s * loss_exp(mu));
        }
    }

    #[test]
    fn tiny_sigma_both_sides_vanish() {
        let s = 1e-4;
        let r = verify_q_threshold(&[s], 1.0, 0.05).unwrap();
        assert!(r.passed());
        let mu = r_threshold(s);
        assert!(q_sigma(mu, s).abs() < 1e-3 && 0.25 * s * loss_exp(mu) < 1e-4);
    }

    #[test]
    fn root_below_r() {
        assert!(verify_q_root_below_r(&default_sigma_grid()).unwrap().passed());
    }

    #[test]
    fn kernel_bounds_pass() {
        let r = verify_kernel_bounds(&default_sigma_grid(), &default_mu_grid());
        assert!(r.passed(), "{:?}", r.worst());
    }

    #[test]
    fn backends_agree() {
        let r = verify_backend_agreement(&default_sigma_grid(), &default_mu_grid(), 96, 1e-8);
        assert!(r.passed(), "{:?}", r.worst());
    }

    #[test]
    fn q_matches_fd() {
        let r = verify_q_finite_difference(&default_sigma_grid(), &default_mu_grid(), 1e-6);
        assert!(r.passed(), "{:?}", r.worst());
    }

    #[test]
    fn population_gradient_matches_fd() {
        let r = verify_gradient_finite_difference(50, 11, 1e-6);
        assert!(r.passed(), "{:?}", r.worst());
        assert_eq!(r.evaluated, 50);
    }

    #[test]
    fn integral_identities_hold_and_printed_form_overshoots() {
        let r = verify_integral_identities(1e-9).unwrap();
        assert!(r.passed(), "{:?}", r.worst());
        assert!(r.note("printed_over_true_max").unwrap() > 1.0);
    }

    #[test]
    fn surrogate_ratio_exceeds_four_in_tails() {
        let t = surrogate_ratio_table(10.0, 0.05);
        let (_, r0) = t.iter().find(|(x, _)| x.abs() < 1e-12).copied().unwrap();
        assert!((r0 - std::f64::consts::LN_2).abs() < 1e-15);
        let r = verify_surrogate_ratio(10.0, 0.05, 0.25, 4.0);
        assert_eq!(r.status, Status::Fail);
        let w = r.worst().unwrap();
        assert!(w.point[0].abs() > 9.0 && w.measured > 10.0);
    }
}
