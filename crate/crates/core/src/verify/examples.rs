//! Reproductions of the two failure cases and their controls.

use super::report::{VerificationReport, Witness};
use crate::distributions::{GaussianTargetSpec, LogConcaveComponent, MixtureSignalSpec, SpdMatrix};
use crate::error::{Error, Result};
use crate::loss::{dl_dsigma_general, population_loss_general, Classifier};
use crate::trainer::{run_entropy_min, GaussianPopulation, TrainerConfig, Trajectory};

/// Step size of the Example 1 runs.
pub const EXAMPLE1_ETA: f64 = 0.1;

fn first_axis(d2: usize, v: f64) -> Vec<f64> {
    let mut w2 = vec![0.0; d2];
    w2[0] = v;
    w2
}

/// Entropy minimisation on the Gaussian population from `w0`; the same
/// trainer path as every other population run.
pub fn example1_run(spec: &GaussianTargetSpec<f64>, w0: &Classifier<f64>, steps: usize) -> Result<Trajectory<f64>> {
    let cfg = TrainerConfig { eta: EXAMPLE1_ETA, max_steps: steps, stop_tol: 0.0, ..TrainerConfig::default() };
    run_entropy_min(w0, &cfg, &mut GaussianPopulation::new(spec.clone()))
}

/// `(pre-projection ‖w₂‖ at step k) - (‖w₂‖ at step k-1)` for each step.
fn growth(t: &Trajectory<f64>) -> impl Iterator<Item = (usize, f64)> + '_ {
    t.records.windows(2).map(|p| (p[1].step, p[1].pre_projection_norm_w2 - p[0].norm_w2))
}

/// From `w₀ = (0, 0.5·e₁)` with `γ = 1`, `σ₁ = 1`: the spurious norm must
/// strictly grow at every one of the first `steps` gradient steps.
pub fn reproduce_example1(sigma2: &SpdMatrix<f64>, steps: usize) -> Result<VerificationReport> {
    let spec = GaussianTargetSpec::new(vec![1.0], 1.0, sigma2.clone())?;
    let w0 = Classifier::new(vec![0.0], first_axis(sigma2.dim(), 0.5), 1.0)?;
    let t = example1_run(&spec, &w0, steps)?;
    let ws: Vec<Witness> =
        growth(&t).map(|(k, d)| Witness::at_least("norm w2 growth", vec![k as f64], d, f64::MIN_POSITIVE)).collect();
    Ok(VerificationReport::from_witnesses("example1", 0.0, ws).with_note("final_norm_w2", t.last().norm_w2))
}

/// Control: `w₀ = (1, 0.1·e₁)` rescaled to the unit sphere, separated signal
/// `γ = 4`; the spurious norm must strictly shrink at every step.
pub fn reproduce_example1_control(sigma2: &SpdMatrix<f64>, steps: usize) -> Result<VerificationReport> {
    let spec = GaussianTargetSpec::new(vec![4.0], 1.0, sigma2.clone())?;
    let w0 = Classifier::on_sphere(vec![1.0], first_axis(sigma2.dim(), 0.1), 1.0)?;
    let t = example1_run(&spec, &w0, steps)?;
    let ws: Vec<Witness> =
        growth(&t).map(|(k, d)| Witness::at_most("norm w2 growth", vec![k as f64], d, -f64::MIN_POSITIVE)).collect();
    Ok(VerificationReport::from_witnesses("example1_control", 0.0, ws).with_note("final_norm_w2", t.last().norm_w2))
}

/// Parameters of the three-spike margin distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example2 {
    /// Outer spikes at `±mu_spike`, mass `(1 - minority_mass)/2` each.
    pub mu_spike: f64,
    /// Mass of the spike at 0.
    pub minority_mass: f64,
    /// Standard deviation of every spike.
    pub spike_std: f64,
    /// Spurious noise level `σ` at which `L` and `∂L/∂σ` are evaluated.
    pub sigma: f64,
}

impl Default for Example2 {
    fn default() -> Self {
        Example2 { mu_spike: 15.0, minority_mass: 0.05, spike_std: 0.05, sigma: 0.5 }
    }
}

/// Spike width of the log-smooth control.
pub const EXAMPLE2_CONTROL_STD: f64 = 6.0;

impl Example2 {
    pub fn signal(&self) -> Result<MixtureSignalSpec> {
        if !(0.0..1.0).contains(&self.minority_mass) {
            return Err(Error::InvalidInput(format!("minority_mass must lie in [0, 1), got {}", self.minority_mass)));
        }
        let outer = 0.5 * (1.0 - self.minority_mass);
        let mut comps = vec![
            LogConcaveComponent::gaussian(self.mu_spike, self.spike_std, 1)?,
            LogConcaveComponent::gaussian(-self.mu_spike, self.spike_std, -1)?,
        ];
        let mut weights = vec![outer, outer];
        if self.minority_mass > 0.0 {
            comps.push(LogConcaveComponent::gaussian(0.0, self.spike_std, 1)?);
            weights.push(self.minority_mass);
        }
        MixtureSignalSpec::new(comps, weights)
    }

    /// `(L(w), ∂L/∂σ)` at `w = (1, σ)` with `Σ₂ = 1`.
    pub fn evaluate(&self) -> Result<(f64, f64)> {
        let signal = self.signal()?;
        let w = Classifier { w1: vec![1.0], w2: vec![self.sigma], radius: 1f64.hypot(self.sigma) };
        let s2 = SpdMatrix::identity(1);
        Ok((population_loss_general(&w, &signal, &s2)?, dl_dsigma_general(&w, &signal, &s2)?))
    }
}

fn example2_report(name: &str, cfg: &Example2, want_negative: bool) -> Result<VerificationReport> {
    let (l, d) = cfg.evaluate()?;
    let p = vec![cfg.mu_spike, cfg.minority_mass, cfg.spike_std, cfg.sigma];
    let slope = if want_negative {
        Witness::at_most("dL/dsigma < 0", p.clone(), d, -f64::MIN_POSITIVE)
    } else {
        Witness::at_least("dL/dsigma > 0", p.clone(), d, f64::MIN_POSITIVE)
    };
    let ws = vec![Witness::at_most("L < 0.05", p, l, 0.05 * (1.0 - f64::EPSILON)), slope];
    Ok(VerificationReport::keep_all(name, 0.0, ws).with_note("loss", l).with_note("dl_dsigma", d))
}

/// Narrow spikes: passes iff `L < 0.05` and `∂L/∂σ < 0`.
pub fn reproduce_example2(mu_spike: f64, minority_mass: f64) -> Result<VerificationReport> {
    reproduce_example2_with(&Example2 { mu_spike, minority_mass, ..Example2::default() })
}

pub fn reproduce_example2_with(cfg: &Example2) -> Result<VerificationReport> {
    example2_report("example2", cfg, true)
}

/// Log-smooth control: every spike widened to `width`; passes iff `L < 0.05`
/// and `∂L/∂σ > 0`.
pub fn reproduce_example2_control(mu_spike: f64, minority_mass: f64, width: f64) -> Result<VerificationReport> {
    let cfg = Example2 { mu_spike, minority_mass, spike_std: width, ..Example2::default() };
    example2_report("example2_control", &cfg, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::smoothed::{g_sigma, q_sigma};

    #[test]
    fn example1_grows() {
        let r = reproduce_example1(&SpdMatrix::identity(1), 100).unwrap();
        assert!(r.passed(), "{:?}", r.worst());
        assert_eq!(r.evaluated, 100);
    }

    #[test]
    fn example1_zero_steps_is_vacuous() {
        let r = reproduce_example1(&SpdMatrix::identity(1), 0).unwrap();
        assert!(r.passed());
        assert_eq!(r.evaluated, 0);
    }

    #[test]
    fn example1_control_shrinks() {
        let r = reproduce_example1_control(&SpdMatrix::identity(1), 100).unwrap();
        assert!(r.passed(), "{:?}", r.worst());
    }

    /// Per component, `E[g_σ(μ)] = g_S(m)` with `S = √(s² + σ²)` and
    /// `∂/∂σ = q_S(m)·σ/S`.
    fn closed_form(c: &Example2) -> (f64, f64) {
        let s = c.spike_std.hypot(c.sigma);
        let outer = 0.5 * (1.0 - c.minority_mass);
        let l = 2.0 * outer * g_sigma(c.mu_spike, s) + c.minority_mass * g_sigma(0.0, s);
        let d = (2.0 * outer * q_sigma(c.mu_spike, s) + c.minority_mass * q_sigma(0.0, s)) * c.sigma / s;
        (l, d)
    }

    #[test]
    fn example2_matches_closed_form() {
        for c in [Example2::default(), Example2 { spike_std: 6.0, ..Example2::default() }] {
            let (l, d) = c.evaluate().unwrap();
            let (lc, dc) = closed_form(&c);
            assert!((l - lc).abs() < 1e-10 * lc.max(1e-3), "{l} vs {lc}");
            assert!((d - dc).abs() < 1e-10 * dc.abs().max(1e-3), "{d} vs {dc}");
        }
    }

    #[test]
    fn example2_defaults_pass() {
        let r = reproduce_example2(15.0, 0.05).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.note("dl_dsigma").unwrap() < 0.0 && r.note("loss").unwrap() < 0.05);
    }

    #[test]
    fn example2_without_minority_has_positive_slope() {
        let (_, d) = Example2 { minority_mass: 0.0, ..Example2::default() }.evaluate().unwrap();
        assert!(d > 0.0);
    }

    #[test]
    fn example2_control_inverts_sign() {
        let r = reproduce_example2_control(15.0, 0.05, EXAMPLE2_CONTROL_STD).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.note("dl_dsigma").unwrap() > 0.0);
    }
}
