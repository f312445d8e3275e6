//! Assumption checkers, safe-set membership and the general-case threshold
//! chain.

use super::report::{VerificationReport, Witness};
use crate::distributions::{GaussianTargetSpec, MixtureSignalSpec, SpdMatrix};
use crate::error::{Error, Result};
use crate::kernels::smoothed::loss_exp;
use crate::kernels::special::erfc_f64;
use crate::kernels::threshold::{golden_section, kappa, kappa_constants, r_threshold};
use crate::loss::{
    density_at_zero, dl_dsigma_general, population_accuracy_gaussian, population_loss_general, random_w_grid,
    safe_set_margin, Classifier,
};
use crate::scalar::Scalar;
use std::f64::consts::PI;

/// `L((w₁, 0))` for a 1-d signal, with the spurious block absent.
fn purified_loss(signal: &MixtureSignalSpec, w1: f64) -> Result<f64> {
    if w1 == 0.0 {
        return Ok(1.0);
    }
    let w = Classifier { w1: vec![w1], w2: vec![0.0], radius: 1.0 };
    population_loss_general(&w, signal, &SpdMatrix::identity(1))
}

/// Separation: `min_{|w₁|≤1} L((w₁, 0)) ≤ τ_min·κ(β, α)`, compared in log
/// space. The minimum is located by golden-section search on each half of
/// `[-1, 1]`; endpoints are evaluated as well.
pub fn check_separation(signal: &MixtureSignalSpec, alpha: f64, beta: f64) -> Result<VerificationReport> {
    let k = kappa(beta, alpha)?;
    let f = |x: f64| purified_loss(signal, x).unwrap_or(f64::INFINITY);
    let mut best = (0.0, f(0.0));
    for (lo, hi) in [(-1.0, 0.0), (0.0, 1.0)] {
        for cand in [golden_section(f, lo, hi, 1e-10), (lo, f(lo)), (hi, f(hi))] {
            if cand.1 < best.1 {
                best = cand;
            }
        }
    }
    let (w1, l) = best;
    let ln_bound = signal.tau_min().ln() + k.ln_kappa;
    let w = Witness::at_most("ln L((w1,0)) <= ln(tau_min*kappa)", vec![w1], l.ln(), ln_bound);
    Ok(VerificationReport::from_witnesses("separation", 0.0, vec![w])
        .with_note("min_loss", l)
        .with_note("ln_kappa", k.ln_kappa)
        .with_note("ln_loss_over_bound", l.ln() - ln_bound))
}

/// Cap `0.03·min{1, α/β², 1/β, |log β|/β}` on the source classifier's
/// spurious variance.
pub fn init_sigma_cap(alpha: f64, beta: f64) -> f64 {
    0.03 * [1.0, alpha / (beta * beta), 1.0 / beta, beta.ln().abs() / beta].into_iter().fold(f64::INFINITY, f64::min)
}

/// Initialisation: `‖w₁ˢ‖ ≥ 1/2`, `σ² = w₂ˢᵀΣ₂w₂ˢ ≤` [`init_sigma_cap`] and
/// `L(wˢ) ≤ τ_min·κ(β, α)` (log space). All three witnesses are kept.
pub fn check_init<T: Scalar>(
    w_s: &Classifier<T>,
    sigma2: &SpdMatrix<T>,
    alpha: f64,
    beta: f64,
    l_ws: f64,
    tau_min: f64,
) -> Result<VerificationReport> {
    if w_s.d2() != sigma2.dim() {
        return Err(Error::DimensionMismatch { what: "w2 vs Sigma2", expected: sigma2.dim(), got: w_s.d2() });
    }
    let k = kappa(beta, alpha)?;
    let cap = init_sigma_cap(alpha, beta);
    let s2 = sigma2.quad_form(&w_s.w2).f64();
    let ln_bound = tau_min.ln() + k.ln_kappa;
    let ws = vec![
        Witness::at_least("norm w1 >= 1/2", vec![], w_s.norm_w1().f64(), 0.5),
        Witness::at_most("sigma^2 <= cap", vec![], s2, cap),
        Witness::at_most("ln L(ws) <= ln(tau_min*kappa)", vec![], l_ws.ln(), ln_bound),
    ];
    Ok(VerificationReport::keep_all("init", 0.0, ws).with_note("sigma_cap", cap).with_note("ln_kappa", k.ln_kappa))
}

/// `(w ∈ S, γᵀw₁ - r(R·σ̃_max))`.
pub fn in_safe_set<T: Scalar>(w: &Classifier<T>, spec: &GaussianTargetSpec<T>, radius: T) -> (bool, T) {
    safe_set_margin(w, spec, radius)
}

/// Error level `ρ = ½·erfc(r(Rσ̃_max)/(√2·Rσ̃_min))` below which a classifier
/// of norm `R` lies in the safe set.
pub fn safe_set_error_level(spec: &GaussianTargetSpec<f64>, radius: f64) -> f64 {
    let (lo, hi) = spec.tilde_sigma_range();
    0.5 * erfc_f64(r_threshold(radius * hi) / (std::f64::consts::SQRT_2 * radius * lo))
}

/// Classifiers drawn on the sphere of radius `radius` whose exact accuracy is
/// at least `1 - ρ` must have non-negative safe-set margin. Notes record how
/// many draws met the accuracy level.
pub fn verify_accuracy_to_margin(
    spec: &GaussianTargetSpec<f64>,
    radius: f64,
    count: usize,
    seed: u64,
) -> VerificationReport {
    let rho = safe_set_error_level(spec, radius);
    let mut qualified = 0usize;
    let ws: Vec<Witness> = random_w_grid(spec.d1(), spec.d2(), radius, count, seed)
        .into_iter()
        .filter(|w| population_accuracy_gaussian(w, spec) >= 1.0 - rho)
        .map(|w| {
            qualified += 1;
            let (_, m) = in_safe_set(&w, spec, radius);
            Witness::at_least("margin >= 0", w.concat(), m, 0.0)
        })
        .collect();
    VerificationReport::from_witnesses("accuracy_to_margin", 0.0, ws)
        .with_note("rho", rho)
        .with_note("qualified", qualified as f64)
}

/// Lower bound `σ·p₀^{1-ν/4ρ}·√π/(22√ρ)·(√ν/(2√π))^{ν/4ρ}` on `∂L/∂σ`, in
/// log space.
pub fn ln_dsigma_bound(sigma: f64, ln_p0: f64, rho: f64, nu: f64) -> f64 {
    let e = nu / (4.0 * rho);
    sigma.ln() + (1.0 - e) * ln_p0 + (PI.sqrt() / (22.0 * rho.sqrt())).ln() + e * (nu.sqrt() / (2.0 * PI.sqrt())).ln()
}

/// Chain `L(w) ≤ κ̃ ⟹ p(0) ≤ p* ⟹ ∂L/∂σ ≥ bound > 0` for a one-component
/// signal, with `ν = α/w₁²`, `ρ = β/w₁²`. Not applicable when `L(w) > κ̃`.
/// Comparisons are made between logarithms.
pub fn verify_loss_thresholds(
    signal: &MixtureSignalSpec,
    w: &Classifier<f64>,
    sigma2: &SpdMatrix<f64>,
) -> Result<VerificationReport> {
    if signal.components.len() != 1 {
        return Err(Error::InvalidInput(format!("need one component, got {}", signal.components.len())));
    }
    let c = &signal.components[0];
    let w1 = w.w1.first().copied().unwrap_or(0.0);
    if w.d1() != 1 || w1 == 0.0 {
        return Err(Error::InvalidInput("need d1 = 1 and w1 != 0".into()));
    }
    let sigma = sigma2.quad_form(&w.w2).max(0.0).sqrt();
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput("need sigma = sqrt(w2' Sigma2 w2) > 0".into()));
    }
    let (nu, rho) = (c.alpha / (w1 * w1), c.beta / (w1 * w1));
    let k = kappa_constants(rho, nu)?;
    let l = population_loss_general(w, signal, sigma2)?;
    let hyp = Witness::at_most("ln L <= ln kappa_tilde", vec![w1, sigma], l.ln(), k.ln_kappa_tilde);
    let base = |r: VerificationReport| {
        r.with_note("loss", l)
            .with_note("ln_kappa_tilde", k.ln_kappa_tilde)
            .with_note("ln_p_star", k.ln_p_star)
            .with_note("margin_loss", k.ln_kappa_tilde - l.ln())
    };
    if !hyp.holds(0.0) {
        return Ok(base(VerificationReport::not_applicable("loss_thresholds", 0.0, vec![hyp])));
    }
    let ln_p0 = c.log_density(0.0) - w1.abs().ln();
    debug_assert!((ln_p0.exp() - density_at_zero(w, signal).unwrap_or(0.0)).abs() <= 1e-12 * ln_p0.exp().max(1e-300));
    let d = dl_dsigma_general(w, signal, sigma2)?;
    let ln_bound = ln_dsigma_bound(sigma, ln_p0, rho, nu);
    let ln_d = if d > 0.0 { d.ln() } else { f64::NEG_INFINITY };
    let ws = vec![
        hyp,
        Witness::at_most("ln p(0) <= ln p*", vec![w1, sigma], ln_p0, k.ln_p_star),
        Witness::at_least("ln dL/dsigma >= ln bound", vec![w1, sigma], ln_d, ln_bound),
    ];
    Ok(base(VerificationReport::keep_all("loss_thresholds", 0.0, ws))
        .with_note("ln_p0", ln_p0)
        .with_note("dl_dsigma", d)
        .with_note("ln_dsigma_bound", ln_bound)
        .with_note("margin_density", k.ln_p_star - ln_p0)
        .with_note("margin_dsigma", ln_d - ln_bound))
}

/// `ℓ_exp` at the mode of each component, weighted: a cheap proxy for the
/// purified loss used to pick separated examples.
pub fn loss_at_modes(signal: &MixtureSignalSpec, w1: f64) -> f64 {
    signal.components.iter().zip(&signal.weights).map(|(c, &t)| t * loss_exp(w1 * c.mode())).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::LogConcaveComponent;
    use crate::verify::report::Status;

    #[test]
    fn separation_fails_at_ten_passes_at_forty() {
        let r10 = check_separation(&MixtureSignalSpec::symmetric_gaussian(10.0, 1.0).unwrap(), 1.0, 1.0).unwrap();
        assert_eq!(r10.status, Status::Fail);
        assert!((r10.witnesses[0].point[0].abs() - 1.0).abs() < 1e-6);
        let r40 = check_separation(&MixtureSignalSpec::symmetric_gaussian(40.0, 1.0).unwrap(), 1.0, 1.0).unwrap();
        assert!(r40.passed(), "{:?}", r40.worst());
    }

    #[test]
    fn separation_overlap_fails() {
        let r = check_separation(&MixtureSignalSpec::symmetric_gaussian(0.0, 1.0).unwrap(), 1.0, 1.0).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.note("min_loss").unwrap() > 0.5);
    }

    #[test]
    fn separation_is_monotone_in_gamma() {
        let mut seen_pass = false;
        let mut last_ratio = f64::INFINITY;
        for g in (0..=12).map(|i| 5.0 * i as f64) {
            let r = check_separation(&MixtureSignalSpec::symmetric_gaussian(g, 1.0).unwrap(), 1.0, 1.0).unwrap();
            let ratio = r.note("ln_loss_over_bound").unwrap();
            assert!(ratio <= last_ratio + 1e-9);
            last_ratio = ratio;
            if seen_pass {
                assert!(r.passed(), "gamma {g} flipped back to fail");
            }
            seen_pass |= r.passed();
        }
        assert!(seen_pass);
    }

    #[test]
    fn init_slack_point_passes() {
        let w = Classifier::new(vec![1.0], vec![0.0], 1.0).unwrap();
        let r = check_init(&w, &SpdMatrix::identity(1), 1.0, 1.0, 1e-20, 0.5).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
        assert_eq!(r.witnesses.len(), 3);
    }

    #[test]
    fn init_short_w1_fails_mass_condition() {
        let w = Classifier::new(vec![0.4], vec![0.0], 1.0).unwrap();
        let r = check_init(&w, &SpdMatrix::identity(1), 1.0, 1.0, 1e-20, 0.5).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(!r.witnesses[0].holds(0.0));
        assert!(r.witnesses[1].holds(0.0) && r.witnesses[2].holds(0.0));
    }

    #[test]
    fn init_cap_boundary_is_inclusive() {
        let (alpha, beta) = (0.5, 2.0);
        let cap = init_sigma_cap(alpha, beta);
        let w = Classifier::new(vec![0.9], vec![cap.sqrt()], 1.0).unwrap();
        let r = check_init(&w, &SpdMatrix::identity(1), alpha, beta, 1e-40, 0.5).unwrap();
        assert!(r.witnesses[1].holds(0.0), "{:?}", r.witnesses[1]);
    }

    #[test]
    fn init_cap_vanishes_at_unit_smoothness() {
        assert_eq!(init_sigma_cap(1.0, 1.0), 0.0);
    }

    #[test]
    fn safe_set_membership() {
        let spec = GaussianTargetSpec::new(vec![4.0], 1.0, SpdMatrix::identity(1)).unwrap();
        let (inside, m) = in_safe_set(&Classifier::new(vec![1.0], vec![0.0], 1.0).unwrap(), &spec, 1.0);
        assert!(inside && m > 0.0);
        let (inside, _) = in_safe_set(&Classifier::new(vec![0.0], vec![1.0], 1.0).unwrap(), &spec, 1.0);
        assert!(!inside);
    }

    #[test]
    fn accurate_classifiers_are_safe() {
        let spec = GaussianTargetSpec::new(vec![4.0], 1.0, SpdMatrix::identity(2)).unwrap();
        let r = verify_accuracy_to_margin(&spec, 1.0, 2000, 3);
        assert!(r.passed(), "{:?}", r.worst());
        assert!(r.note("qualified").unwrap() > 100.0);
    }

    #[test]
    fn thresholds_chain_for_separated_gaussian() {
        let signal = MixtureSignalSpec::single(LogConcaveComponent::gaussian(30.0, 1.0, 1).unwrap());
        let w = Classifier::on_sphere(vec![1.0], vec![0.05], 1.0).unwrap();
        let r = verify_loss_thresholds(&signal, &w, &SpdMatrix::identity(1)).unwrap();
        assert!(r.passed(), "{r:?}");
        for k in ["margin_loss", "margin_density", "margin_dsigma"] {
            assert!(r.note(k).unwrap() > 0.0, "{k}");
        }
    }

    #[test]
    fn thresholds_not_applicable_for_cos_bump_at_four() {
        let signal = MixtureSignalSpec::single(LogConcaveComponent::cos_bump(4.0, 1).unwrap());
        let w = Classifier::on_sphere(vec![1.0], vec![0.05], 1.0).unwrap();
        let r = verify_loss_thresholds(&signal, &w, &SpdMatrix::identity(1)).unwrap();
        assert_eq!(r.status, Status::NotApplicable);
        assert!(r.note("margin_loss").unwrap() < 0.0);
    }

    #[test]
    fn thresholds_not_applicable_for_concentrated_mass_at_zero() {
        let signal = MixtureSignalSpec::single(LogConcaveComponent::gaussian(0.0, 0.1, 1).unwrap());
        let w = Classifier::on_sphere(vec![1.0], vec![0.1], 1.0).unwrap();
        let r = verify_loss_thresholds(&signal, &w, &SpdMatrix::identity(1)).unwrap();
        assert_eq!(r.status, Status::NotApplicable);
    }
}
