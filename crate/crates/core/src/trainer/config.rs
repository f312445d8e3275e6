//! Trainer configuration.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Self-training algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    EntropyMin,
    PseudoStep,
    PseudoRounds,
    NoisyGd,
}

/// Where gradients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientSource {
    #[default]
    Population,
    Empirical,
}

/// Parameters shared by all runs.
///
/// For [`Variant::PseudoRounds`], `max_steps` counts rounds and each round
/// takes `epochs_per_round` gradient steps; otherwise it counts steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig<T> {
    pub variant: Variant,
    pub eta: T,
    pub radius: T,
    pub max_steps: usize,
    pub conf_threshold: T,
    pub epochs_per_round: usize,
    pub noise_scale: T,
    pub seed: u64,
    pub gradient_source: GradientSource,
    /// Run stops once `‖w₂‖ ≤ stop_tol`.
    pub stop_tol: T,
}

impl<T: Scalar> Default for TrainerConfig<T> {
    fn default() -> Self {
        TrainerConfig {
            variant: Variant::EntropyMin,
            eta: T::lit(0.1),
            radius: T::one(),
            max_steps: 1000,
            conf_threshold: T::lit(0.1),
            epochs_per_round: 1,
            noise_scale: T::zero(),
            seed: 0,
            gradient_source: GradientSource::Population,
            stop_tol: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> TrainerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.eta > T::zero()) || !self.eta.is_finite() {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.radius > T::zero()) || !self.radius.is_finite() {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if !(self.conf_threshold >= T::zero()) {
            return bad(format!("conf_threshold must be non-negative, got {}", self.conf_threshold));
        }
        if !(self.noise_scale >= T::zero()) {
            return bad(format!("noise_scale must be non-negative, got {}", self.noise_scale));
        }
        if !(self.stop_tol >= T::zero()) {
            return bad(format!("stop_tol must be non-negative, got {}", self.stop_tol));
        }
        if self.variant == Variant::PseudoRounds && self.epochs_per_round == 0 {
            return bad("epochs_per_round must be at least 1".into());
        }
        Ok(())
    }
}
