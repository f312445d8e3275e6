//! Population and empirical losses, gradients and `∂L/∂σ`.

pub mod classifier;
pub mod deviation;
pub mod empirical;
pub mod general;
pub mod population;
pub mod reduce;

pub use classifier::Classifier;
pub use deviation::{grad_deviation, random_w_grid, sup_deviation, DeviationRow, DeviationTable};
pub use empirical::{
    empirical_accuracy, empirical_grad, empirical_grad_with, empirical_loss, empirical_loss_with, labeled_grad,
    labeled_loss, pseudo_label_grad_empirical, pseudo_labels, Surrogate,
};
pub use general::{
    density_at_zero, dl_dsigma_general, population_accuracy_general, population_grad_general, population_loss_general,
};
pub use population::{
    dl_dsigma_gaussian, population_accuracy_gaussian, population_grad_gaussian, population_loss_gaussian,
    pseudo_label_grad_gaussian, q_at, safe_set_margin, sigma_decomposition, signal_margin, SigmaDecomposition,
};
