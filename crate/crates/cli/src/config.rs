//! Scenario configuration: `[distribution]`, `[trainer]`, `[experiment]`,
//! plus optional `[concentration]` and `[verify]` sections.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use crate::error::CliError;
use serde::Deserialize;
use spurlab_core::distributions::{random_gamma, GaussianTargetSpec, SpdMatrix, ToySourceSpec};
use spurlab_core::trainer::{GradientSource, TrainerConfig, Variant};
use spurlab_core::verify::{uniform_grid, SuiteConfig};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    /// Labeled source with correlated spurious coordinates, Gaussian target.
    #[default]
    Toy,
    /// Gaussian target only; the initial classifier comes from `trainer.w0`.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistributionSection {
    pub kind: DistributionKind,
    /// Explicit signal mean; when absent it is drawn per seed on the sphere
    /// of radius `gamma_radius`.
    pub gamma: Option<Vec<f64>>,
    pub gamma_radius: f64,
    pub d1: usize,
    pub d2: usize,
    pub corr_prob: f64,
    pub sigma1: f64,
    /// Diagonal of the spurious covariance; identity when absent.
    pub sigma2_diag: Option<Vec<f64>>,
}

impl Default for DistributionSection {
    fn default() -> Self {
        DistributionSection {
            kind: DistributionKind::Toy,
            gamma: None,
            gamma_radius: 2.0,
            d1: 2,
            d2: 2,
            corr_prob: 0.8,
            sigma1: 1.0,
            sigma2_diag: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    EntropyMin,
    PseudoStep,
    PseudoRounds,
    NoisyGd,
}

impl From<VariantName> for Variant {
    fn from(v: VariantName) -> Self {
        match v {
            VariantName::EntropyMin => Variant::EntropyMin,
            VariantName::PseudoStep => Variant::PseudoStep,
            VariantName::PseudoRounds => Variant::PseudoRounds,
            VariantName::NoisyGd => Variant::NoisyGd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceName {
    Population,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainerSection {
    pub variant: VariantName,
    pub eta: f64,
    pub radius: f64,
    /// Steps, or rounds for `pseudo_rounds`.
    pub max_steps: usize,
    pub conf_threshold: f64,
    pub epochs_per_round: usize,
    pub noise_scale: f64,
    pub gradient_source: SourceName,
    pub stop_tol: f64,
    /// Initial classifier `[w₁…, w₂…]`; required for the `gaussian` kind.
    pub w0: Option<Vec<f64>>,
    pub source_eta: f64,
    pub source_max_steps: usize,
    pub source_tol: f64,
}

impl Default for TrainerSection {
    fn default() -> Self {
        TrainerSection {
            variant: VariantName::EntropyMin,
            eta: 0.5,
            radius: 1.0,
            max_steps: 400,
            conf_threshold: 0.1,
            epochs_per_round: 50,
            noise_scale: 0.0,
            gradient_source: SourceName::Empirical,
            stop_tol: 0.0,
            w0: None,
            source_eta: 1.0,
            source_max_steps: 10_000,
            source_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// Source training size and per-step target batch size.
    pub n_samples: usize,
    pub n_test: usize,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Draw a new target batch every step (round); otherwise reuse one.
    pub fresh_batches: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            n_samples: 10_000,
            n_test: 10_000,
            seeds: vec![0, 1, 2, 3, 4],
            output_dir: PathBuf::from("out"),
            fresh_batches: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConcentrationSection {
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub w_grid_size: usize,
    pub rate_band: [f64; 2],
}

impl Default for ConcentrationSection {
    fn default() -> Self {
        ConcentrationSection {
            n_values: vec![1_000, 10_000, 100_000, 1_000_000],
            trials: 20,
            w_grid_size: 16,
            rate_band: [-0.65, -0.35],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub sigma_start: f64,
    pub sigma_end: f64,
    pub sigma_step: f64,
    pub mu_extent: f64,
    pub mu_step: f64,
    pub quadrature_nodes: usize,
    pub backend_tol: f64,
    pub fd_tol: f64,
    pub gradient_samples: usize,
    pub example1_steps: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        let d = SuiteConfig::default();
        VerifySection {
            sigma_start: 0.05,
            sigma_end: 5.0,
            sigma_step: 0.05,
            mu_extent: d.mu_extent,
            mu_step: d.mu_step,
            quadrature_nodes: d.quadrature_nodes,
            backend_tol: d.backend_tol,
            fd_tol: d.fd_tol,
            gradient_samples: d.gradient_samples,
            example1_steps: d.example1_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub distribution: DistributionSection,
    pub trainer: TrainerSection,
    pub experiment: ExperimentSection,
    pub concentration: ConcentrationSection,
    pub verify: VerifySection,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => bad(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Reads `path` when given, otherwise the defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let d = &self.distribution;
        if d.d1 == 0 || d.d2 == 0 {
            return Err(bad("distribution.d1 and distribution.d2 must be at least 1"));
        }
        if let Some(g) = &d.gamma {
            if g.len() != d.d1 || g.iter().any(|v| !v.is_finite()) {
                return Err(bad(format!("distribution.gamma must have {} finite entries", d.d1)));
            }
        } else {
            positive("distribution.gamma_radius", d.gamma_radius)?;
        }
        if !(0.0..=1.0).contains(&d.corr_prob) {
            return Err(bad(format!("distribution.corr_prob must lie in [0, 1], got {}", d.corr_prob)));
        }
        positive("distribution.sigma1", d.sigma1)?;
        if let Some(s) = &d.sigma2_diag {
            if s.len() != d.d2 {
                return Err(bad(format!("distribution.sigma2_diag must have {} entries", d.d2)));
            }
            for &v in s {
                positive("distribution.sigma2_diag entry", v)?;
            }
        }
        let t = &self.trainer;
        self.trainer_config(0).validate().map_err(|e| bad(format!("trainer: {e}")))?;
        if let Some(w0) = &t.w0 {
            if w0.len() != d.d1 + d.d2 || w0.iter().any(|v| !v.is_finite()) {
                return Err(bad(format!("trainer.w0 must have d1 + d2 = {} finite entries", d.d1 + d.d2)));
            }
        } else if d.kind == DistributionKind::Gaussian {
            return Err(bad("trainer.w0 is required for distribution.kind = \"gaussian\""));
        }
        positive("trainer.source_eta", t.source_eta)?;
        if !(t.source_tol >= 0.0) {
            return Err(bad("trainer.source_tol must be non-negative"));
        }
        if t.variant == VariantName::PseudoRounds && t.gradient_source == SourceName::Population {
            return Err(bad("pseudo_rounds needs gradient_source = \"empirical\""));
        }
        let e = &self.experiment;
        if e.n_samples == 0 || e.n_test == 0 {
            return Err(bad("experiment.n_samples and experiment.n_test must be at least 1"));
        }
        if e.seeds.is_empty() {
            return Err(bad("experiment.seeds must not be empty"));
        }
        let mut seen = e.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != e.seeds.len() {
            return Err(bad("experiment.seeds must be distinct"));
        }
        let c = &self.concentration;
        if c.n_values.contains(&0) || c.trials == 0 || c.w_grid_size == 0 {
            return Err(bad("concentration.n_values, trials and w_grid_size must be positive"));
        }
        if !(c.rate_band[0] < c.rate_band[1]) {
            return Err(bad("concentration.rate_band must be increasing"));
        }
        self.suite_config(0)?;
        Ok(())
    }

    pub fn trainer_config(&self, seed: u64) -> TrainerConfig<f64> {
        let t = &self.trainer;
        TrainerConfig {
            variant: t.variant.into(),
            eta: t.eta,
            radius: t.radius,
            max_steps: t.max_steps,
            conf_threshold: t.conf_threshold,
            epochs_per_round: t.epochs_per_round,
            noise_scale: t.noise_scale,
            seed,
            gradient_source: match t.gradient_source {
                SourceName::Population => GradientSource::Population,
                SourceName::Empirical => GradientSource::Empirical,
            },
            stop_tol: t.stop_tol,
        }
    }

    /// Signal mean for `seed`: explicit, or uniform on the sphere.
    pub fn gamma(&self, seed: u64) -> Vec<f64> {
        let d = &self.distribution;
        d.gamma.clone().unwrap_or_else(|| random_gamma(d.d1, d.gamma_radius, seed))
    }

    pub fn sigma2(&self) -> Result<SpdMatrix<f64>, CliError> {
        match &self.distribution.sigma2_diag {
            Some(s) => SpdMatrix::diagonal(s).map_err(|e| bad(e.to_string())),
            None => Ok(SpdMatrix::identity(self.distribution.d2)),
        }
    }

    pub fn target_spec(&self, gamma: Vec<f64>) -> Result<GaussianTargetSpec<f64>, CliError> {
        GaussianTargetSpec::new(gamma, self.distribution.sigma1, self.sigma2()?).map_err(|e| bad(e.to_string()))
    }

    pub fn source_spec(&self, gamma: Vec<f64>) -> Result<ToySourceSpec<f64>, CliError> {
        ToySourceSpec::new(gamma, self.distribution.corr_prob, self.distribution.d2).map_err(|e| bad(e.to_string()))
    }

    pub fn suite_config(&self, seed: u64) -> Result<SuiteConfig, CliError> {
        let v = &self.verify;
        positive("verify.sigma_step", v.sigma_step)?;
        positive("verify.sigma_start", v.sigma_start)?;
        if !(v.sigma_end >= v.sigma_start) {
            return Err(bad("verify.sigma_end must be >= verify.sigma_start"));
        }
        positive("verify.mu_step", v.mu_step)?;
        if !(v.mu_extent >= 0.0) || !v.mu_extent.is_finite() {
            return Err(bad("verify.mu_extent must be non-negative"));
        }
        let c = &self.concentration;
        let cfg = SuiteConfig {
            sigma_grid: uniform_grid(v.sigma_start, v.sigma_end, v.sigma_step),
            mu_grid: uniform_grid(-v.mu_extent, v.mu_extent, v.mu_step),
            mu_extent: v.mu_extent,
            mu_step: v.mu_step,
            quadrature_nodes: v.quadrature_nodes,
            backend_tol: v.backend_tol,
            fd_tol: v.fd_tol,
            gradient_samples: v.gradient_samples,
            example1_steps: v.example1_steps,
            n_values: c.n_values.clone(),
            trials: c.trials,
            w_grid_size: c.w_grid_size,
            rate_band: (c.rate_band[0], c.rate_band[1]),
            seed,
        };
        cfg.validate().map_err(|e| bad(format!("verify: {e}")))?;
        Ok(cfg)
    }
}
