//! Per-seed construction of the initial classifier and the target objective.

use crate::config::{DistributionKind, ScenarioConfig, SourceName};
use crate::error::CliError;
use serde::Serialize;
use spurlab_core::distributions::{derive_seed, sample_source_toy, sample_target, GaussianTargetSpec, TargetSpec};
use spurlab_core::loss::{population_accuracy_gaussian, Classifier, Surrogate};
use spurlab_core::trainer::{train_source, Empirical, GaussianPopulation, Objective};

/// Seed streams derived from a run seed.
pub mod stream {
    pub const GAMMA: u64 = 1;
    pub const SOURCE: u64 = 2;
    pub const TEST: u64 = 3;
    pub const TARGET: u64 = 4;
    pub const NOISE: u64 = 5;
    pub const W_GRID: u64 = 6;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceReport {
    pub steps: usize,
    pub stationarity: f64,
    pub source_train_accuracy: f64,
}

/// Everything a run needs for one seed.
pub struct SeedSetup {
    pub seed: u64,
    pub target: GaussianTargetSpec<f64>,
    pub w0: Classifier<f64>,
    pub source: Option<SourceReport>,
    objective: ObjectiveKind,
}

enum ObjectiveKind {
    Population,
    Empirical(Box<Empirical<f64>>),
}

impl SeedSetup {
    pub fn build(cfg: &ScenarioConfig, seed: u64) -> Result<Self, CliError> {
        let gamma = cfg.gamma(derive_seed(seed, stream::GAMMA));
        let target = cfg.target_spec(gamma.clone())?;
        let radius = cfg.trainer.radius;
        let d1 = cfg.distribution.d1;
        let (w0, source) = match (&cfg.trainer.w0, cfg.distribution.kind) {
            (Some(w), _) => (Classifier::from_concat(w, d1, radius)?, None),
            (None, DistributionKind::Gaussian) => unreachable!("validated: gaussian kind needs w0"),
            (None, DistributionKind::Toy) => {
                let spec = cfg.source_spec(gamma)?;
                let batch = sample_source_toy(&spec, cfg.experiment.n_samples, derive_seed(seed, stream::SOURCE))?;
                let t = &cfg.trainer;
                let fit = train_source(&batch, radius, t.source_eta, t.source_max_steps, t.source_tol)?;
                let acc = spurlab_core::loss::empirical_accuracy(&fit.w, &batch);
                let rep = SourceReport { steps: fit.steps, stationarity: fit.stationarity, source_train_accuracy: acc };
                (fit.w, Some(rep))
            }
        };
        let objective = match cfg.trainer.gradient_source {
            SourceName::Population => ObjectiveKind::Population,
            SourceName::Empirical => {
                let e = &cfg.experiment;
                let spec: TargetSpec<f64> = target.clone().into();
                let train_seed = derive_seed(seed, stream::TARGET);
                let obj = if e.fresh_batches {
                    Empirical::fresh(spec.clone(), e.n_samples, train_seed)?
                } else {
                    Empirical::fixed(sample_target(&spec, e.n_samples, train_seed)?, target.sigma2.clone())?
                        .with_reference(target.clone())
                };
                let test = sample_target(&spec, e.n_test, derive_seed(seed, stream::TEST))?;
                ObjectiveKind::Empirical(Box::new(obj.with_test(test)?))
            }
        };
        Ok(SeedSetup { seed, target, w0, source, objective })
    }

    /// Fresh objective using `surrogate` for the unlabeled loss.
    pub fn objective(&self, surrogate: Surrogate) -> Box<dyn Objective<f64> + Send> {
        match &self.objective {
            ObjectiveKind::Population => Box::new(GaussianPopulation::new(self.target.clone())),
            ObjectiveKind::Empirical(e) => Box::new((**e).clone().with_surrogate(surrogate)),
        }
    }

    pub fn population_accuracy(&self, w: &Classifier<f64>) -> f64 {
        population_accuracy_gaussian(w, &self.target)
    }
}
