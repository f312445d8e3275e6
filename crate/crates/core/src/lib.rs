//! Numerical laboratory for self-training of linear classifiers under
//! spurious-feature domain shift.
//!
//! The core is generic over [`Scalar`] (`f32`/`f64`); the `*64` aliases below
//! fix the common double-precision instantiation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod kernels;
pub mod loss;
pub mod scalar;
pub mod trainer;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Classifier64 = loss::Classifier<f64>;
pub type GaussianTargetSpec64 = distributions::GaussianTargetSpec<f64>;
pub type SampleBatch64 = distributions::SampleBatch<f64>;
pub type SpdMatrix64 = distributions::SpdMatrix<f64>;
pub type TargetSpec64 = distributions::TargetSpec<f64>;
pub type ToySourceSpec64 = distributions::ToySourceSpec<f64>;
pub type TrainerConfig64 = trainer::TrainerConfig<f64>;
pub type Trajectory64 = trainer::Trajectory<f64>;

/// Default floating-point type.
pub type Real = f64;
