//! Source/target distributions, samplers and log-concavity diagnostics.

pub mod batch;
pub mod gaussian;
pub mod logconcave;
pub mod rng;
pub mod spd;
pub mod toy;

pub use batch::{sample_target, SampleBatch, TargetSpec};
pub use gaussian::{bayes_accuracy, GaussianTargetSpec};
pub use logconcave::{estimate_concavity, ks_distance, sample_logconcave_1d, LogConcaveComponent, MixtureSignalSpec};
pub use rng::{derive_seed, rng_from_seed};
pub use spd::SpdMatrix;
pub use toy::{random_gamma, sample_source_toy, ToySourceSpec};
