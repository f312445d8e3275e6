//! Executable certificates for assumptions, lemmas and failure cases.

pub mod checks;
pub mod examples;
pub mod kernels;
pub mod rate;
pub mod report;
pub mod suite;

pub use checks::{
    check_init, check_separation, in_safe_set, init_sigma_cap, safe_set_error_level, verify_accuracy_to_margin,
    verify_loss_thresholds,
};
pub use examples::{
    reproduce_example1, reproduce_example1_control, reproduce_example2, reproduce_example2_control,
    reproduce_example2_with, Example2, EXAMPLE2_CONTROL_STD,
};
pub use kernels::{
    q_root, surrogate_ratio_table, verify_backend_agreement, verify_gradient_finite_difference,
    verify_integral_identities, verify_kernel_bounds, verify_q_finite_difference, verify_q_threshold,
    verify_surrogate_ratio,
};
pub use rate::{estimate_sample_rate, linear_fit, LinearFit, RateEstimate};
pub use report::{write_summary, Bound, Status, VerificationReport, Witness};
pub use suite::{run_suite, uniform_grid, Suite, SuiteConfig};
