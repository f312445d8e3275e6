//! Self-training algorithms and local-minimum certificates.

pub mod certify;
pub mod config;
pub mod objective;
pub mod run;

pub use certify::{
    certify_local_min, default_eta, estimate_smoothness, train_source, Certificate, Condition, SourceFit,
};
pub use config::{GradientSource, TrainerConfig, Variant};
pub use objective::{Empirical, GaussianPopulation, GeneralPopulation, Objective};
pub use run::{
    gd_step, run, run_entropy_min, run_noisy_gd, run_pseudo_rounds, run_pseudo_step, Trajectory, TrajectoryRecord,
};
