//! Selectable verification suites.

use super::checks::{check_init, check_separation, verify_accuracy_to_margin, verify_loss_thresholds};
use super::examples::{
    reproduce_example1, reproduce_example1_control, reproduce_example2, reproduce_example2_control,
    EXAMPLE2_CONTROL_STD,
};
use super::kernels::{
    default_mu_grid, default_sigma_grid, grid, verify_backend_agreement, verify_gradient_finite_difference,
    verify_integral_identities, verify_kernel_bounds, verify_q_finite_difference, verify_q_root_below_r,
    verify_q_threshold,
};
use super::rate::estimate_sample_rate;
use super::report::{VerificationReport, Witness};
use crate::distributions::{random_gamma, GaussianTargetSpec, LogConcaveComponent, MixtureSignalSpec, SpdMatrix};
use crate::error::{Error, Result};
use crate::loss::{grad_deviation, population_loss_general, random_w_grid, Classifier};
use crate::trainer::{certify_local_min, run_entropy_min, GaussianPopulation, TrainerConfig};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Kernels,
    Lemmas,
    Examples,
    FiniteSample,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "kernels" => Ok(Suite::Kernels),
            "lemmas" => Ok(Suite::Lemmas),
            "examples" => Ok(Suite::Examples),
            "finite-sample" => Ok(Suite::FiniteSample),
            _ => Err(Error::InvalidInput(format!(
                "unknown suite '{s}', expected one of all, kernels, lemmas, examples, finite-sample"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Kernels => "kernels",
            Suite::Lemmas => "lemmas",
            Suite::Examples => "examples",
            Suite::FiniteSample => "finite-sample",
        })
    }
}

/// Grids, sizes and seeds of the suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub sigma_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    pub mu_extent: f64,
    pub mu_step: f64,
    pub quadrature_nodes: usize,
    pub backend_tol: f64,
    pub fd_tol: f64,
    pub gradient_samples: usize,
    pub example1_steps: usize,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub w_grid_size: usize,
    pub rate_band: (f64, f64),
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            sigma_grid: default_sigma_grid(),
            mu_grid: default_mu_grid(),
            mu_extent: 20.0,
            mu_step: 0.05,
            quadrature_nodes: 96,
            backend_tol: 1e-8,
            fd_tol: 1e-6,
            gradient_samples: 50,
            example1_steps: 100,
            n_values: vec![1_000, 10_000, 100_000, 1_000_000],
            trials: 20,
            w_grid_size: 16,
            rate_band: (-0.65, -0.35),
            seed: 0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if self.sigma_grid.is_empty() || self.sigma_grid.iter().any(|&s| !(s > 0.0)) || !finite(&self.sigma_grid) {
            return Err(Error::InvalidInput("sigma_grid must be non-empty and positive".into()));
        }
        if self.mu_grid.is_empty() || !finite(&self.mu_grid) {
            return Err(Error::InvalidInput("mu_grid must be non-empty and finite".into()));
        }
        if !(self.mu_extent >= 0.0) || !(self.mu_step > 0.0) {
            return Err(Error::InvalidInput("mu_extent must be >= 0 and mu_step > 0".into()));
        }
        if self.quadrature_nodes < 8 {
            return Err(Error::InvalidInput("quadrature_nodes must be at least 8".into()));
        }
        if self.n_values.contains(&0) || self.trials == 0 || self.w_grid_size == 0 {
            return Err(Error::InvalidInput("n_values, trials and w_grid_size must be positive".into()));
        }
        if !(self.rate_band.0 < self.rate_band.1) {
            return Err(Error::InvalidInput("rate_band must be an increasing pair".into()));
        }
        Ok(())
    }
}

fn renamed(mut r: VerificationReport, name: &str) -> VerificationReport {
    r.check_name = name.to_string();
    r
}

/// Toy target: `γ` uniform on the circle of radius 2, two spurious
/// coordinates with identity covariance.
pub fn toy_target(seed: u64) -> GaussianTargetSpec<f64> {
    GaussianTargetSpec::new(random_gamma(2, 2.0, seed), 1.0, SpdMatrix::identity(2)).expect("valid toy target")
}

/// Slope of the sup gradient deviation of the toy target within `band`.
pub fn sample_rate_check(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let spec = toy_target(cfg.seed);
    let grid = random_w_grid(2, 2, 1.0, cfg.w_grid_size, cfg.seed ^ 0x5eed);
    let table = grad_deviation(&spec, &cfg.n_values, cfg.trials, &grid, cfg.seed)?;
    let est = estimate_sample_rate(&table)?;
    let ws = vec![
        Witness::at_least("slope >= lo", vec![], est.slope, cfg.rate_band.0),
        Witness::at_most("slope <= hi", vec![], est.slope, cfg.rate_band.1),
    ];
    Ok(VerificationReport::keep_all("sample_rate", 0.0, ws)
        .with_note("slope", est.slope)
        .with_note("band_halfwidth", est.band_halfwidth))
}

/// Entropy minimisation to convergence on a 2-d Gaussian signal, then the
/// `(10⁻³, 10⁻³)` certificate at the purified limit.
fn local_min_check() -> Result<VerificationReport> {
    let spec = GaussianTargetSpec::new(vec![2.0, 1.0], 1.0, SpdMatrix::identity(1))?;
    let mut obj = GaussianPopulation::new(spec);
    let w0 = Classifier::on_sphere(vec![0.9, 0.1], vec![0.3], 1.0)?;
    let cfg = TrainerConfig { eta: 0.5, max_steps: 20_000, stop_tol: 1e-12, ..TrainerConfig::default() };
    let t = run_entropy_min(&w0, &cfg, &mut obj)?;
    let w = Classifier::new(t.final_w().w1.clone(), vec![0.0], 1.0)?;
    let c = certify_local_min(&w, &obj, 1e-3, 1e-3)?;
    let ws = vec![
        Witness::at_least("norm w1 >= 1-eps", w.w1.clone(), c.cond1.value, c.cond1.bound),
        Witness::at_most("projected grad <= eps", w.w1.clone(), c.cond2.value, c.cond2.bound),
        Witness::at_least("min eig >= -gamma", w.w1.clone(), c.cond3.value, c.cond3.bound),
    ];
    Ok(VerificationReport::keep_all("local_min_certificate", 0.0, ws))
}

/// Separated two-class Gaussian signal at `±40`, unit variance.
fn separated_signal() -> Result<MixtureSignalSpec> {
    MixtureSignalSpec::symmetric_gaussian(40.0, 1.0)
}

fn init_check() -> Result<VerificationReport> {
    let signal = separated_signal()?;
    let (alpha, beta) = signal.alpha_beta();
    let w = Classifier::new(vec![1.0], vec![0.0], 1.0)?;
    let l = population_loss_general(&w, &signal, &SpdMatrix::identity(1))?;
    check_init(&w, &SpdMatrix::identity(1), alpha, beta, l, signal.tau_min())
}

type Check<'a> = Box<dyn Fn() -> Result<VerificationReport> + Send + Sync + 'a>;

fn checks(suite: Suite, cfg: &SuiteConfig) -> Vec<Check<'_>> {
    let mut v: Vec<Check<'_>> = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Kernels {
        v.push(Box::new(|| Ok(verify_kernel_bounds(&cfg.sigma_grid, &cfg.mu_grid))));
        v.push(Box::new(|| {
            Ok(verify_backend_agreement(&cfg.sigma_grid, &cfg.mu_grid, cfg.quadrature_nodes, cfg.backend_tol))
        }));
        v.push(Box::new(|| Ok(verify_q_finite_difference(&cfg.sigma_grid, &cfg.mu_grid, cfg.fd_tol))));
        v.push(Box::new(|| Ok(verify_gradient_finite_difference(cfg.gradient_samples, cfg.seed, cfg.fd_tol))));
        v.push(Box::new(|| verify_integral_identities(1e-9)));
        v.push(Box::new(|| verify_q_root_below_r(&cfg.sigma_grid)));
    }
    if all || suite == Suite::Lemmas {
        v.push(Box::new(|| verify_q_threshold(&cfg.sigma_grid, cfg.mu_extent, cfg.mu_step)));
        v.push(Box::new(|| {
            let spec = GaussianTargetSpec::new(vec![4.0], 1.0, SpdMatrix::identity(2))?;
            Ok(verify_accuracy_to_margin(&spec, 1.0, 2000, cfg.seed))
        }));
        v.push(Box::new(|| {
            let s = separated_signal()?;
            let (a, b) = s.alpha_beta();
            check_separation(&s, a, b)
        }));
        v.push(Box::new(init_check));
        v.push(Box::new(|| {
            let signal = MixtureSignalSpec::single(LogConcaveComponent::gaussian(30.0, 1.0, 1)?);
            let w = Classifier::on_sphere(vec![1.0], vec![0.05], 1.0)?;
            Ok(renamed(verify_loss_thresholds(&signal, &w, &SpdMatrix::identity(1))?, "loss_thresholds_gaussian"))
        }));
        v.push(Box::new(|| {
            let signal = MixtureSignalSpec::single(LogConcaveComponent::cos_bump(4.0, 1)?);
            let w = Classifier::on_sphere(vec![1.0], vec![0.05], 1.0)?;
            Ok(renamed(verify_loss_thresholds(&signal, &w, &SpdMatrix::identity(1))?, "loss_thresholds_cos_bump"))
        }));
        v.push(Box::new(local_min_check));
    }
    if all || suite == Suite::Examples {
        v.push(Box::new(|| reproduce_example1(&SpdMatrix::identity(1), cfg.example1_steps)));
        v.push(Box::new(|| reproduce_example1_control(&SpdMatrix::identity(1), cfg.example1_steps)));
        v.push(Box::new(|| reproduce_example2(15.0, 0.05)));
        v.push(Box::new(|| reproduce_example2_control(15.0, 0.05, EXAMPLE2_CONTROL_STD)));
    }
    if all || suite == Suite::FiniteSample {
        v.push(Box::new(|| sample_rate_check(cfg)));
    }
    v
}

/// Runs the selected checks in parallel; reports are sorted by name.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    cfg.validate()?;
    let mut out: Vec<VerificationReport> = checks(suite, cfg).par_iter().map(|c| c()).collect::<Result<_>>()?;
    out.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    Ok(out)
}

/// Grid helper re-exported for configuration front ends.
pub fn uniform_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    grid(start, end, step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_parsing() {
        assert_eq!("finite-sample".parse::<Suite>().unwrap(), Suite::FiniteSample);
        assert!("bogus".parse::<Suite>().is_err());
        for s in [Suite::All, Suite::Kernels, Suite::Lemmas, Suite::Examples, Suite::FiniteSample] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
    }

    #[test]
    fn examples_suite_routes_reproductions() {
        let r = run_suite(Suite::Examples, &SuiteConfig::default()).unwrap();
        let names: Vec<_> = r.iter().map(|x| x.check_name.as_str()).collect();
        assert_eq!(names, ["example1", "example1_control", "example2", "example2_control"]);
        assert!(r.iter().all(|x| x.ok()));
    }

    #[test]
    fn lemmas_suite_passes() {
        let r = run_suite(Suite::Lemmas, &SuiteConfig::default()).unwrap();
        for x in &r {
            assert!(x.ok(), "{} {:?}", x.check_name, x.worst());
        }
        let cos = r.iter().find(|x| x.check_name == "loss_thresholds_cos_bump").unwrap();
        assert_eq!(cos.status, crate::verify::Status::NotApplicable);
    }

    #[test]
    fn invalid_grid_rejected() {
        let cfg = SuiteConfig { sigma_grid: vec![], ..SuiteConfig::default() };
        assert!(run_suite(Suite::Kernels, &cfg).is_err());
        let cfg = SuiteConfig { sigma_grid: vec![-1.0], ..SuiteConfig::default() };
        assert!(run_suite(Suite::Kernels, &cfg).is_err());
    }

    #[test]
    fn small_finite_sample_suite_runs() {
        let cfg = SuiteConfig { n_values: vec![500, 1000, 2000, 4000], trials: 10, ..SuiteConfig::default() };
        let r = run_suite(Suite::FiniteSample, &cfg).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].note("slope").unwrap() < 0.0);
    }
}
