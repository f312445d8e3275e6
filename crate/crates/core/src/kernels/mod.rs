//! Scalar analytic layer: surrogate losses, Gaussian smoothing, thresholds.

pub mod quadrature;
pub mod smoothed;
pub mod special;
pub mod threshold;

pub use quadrature::{gh_expectation, integrate_adaptive, integrate_pieces, GaussRule};
pub use smoothed::{dg_dmu, dloss_ent, dloss_exp, g_sigma, loss_ent, loss_exp, q_sigma, Backend, SmoothedLoss};
pub use special::{erf, erfc, erfcx, norm_cdf};
pub use threshold::{
    golden_section, kappa, kappa_constants, r_branches, r_breakpoint, r_threshold, Kappa, ThresholdConstants,
};
