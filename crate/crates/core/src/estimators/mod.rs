//! Estimators of a scalar parameter from a trajectory and the Monte-Carlo
//! harness that compares their MSE with Cramér-Rao curves.

mod experiment;
mod likelihood;
mod stats;

pub use experiment::{
    default_n_grid, jackknife_mean, log_grid, run_mse_experiment, run_mse_experiment_with,
    EstimationRun, EstimatorId, ExperimentModel, MseRow,
};
pub use likelihood::{
    log_likelihood, maximize_scalar, mle, uncorrelated_log_likelihood, uncorrelated_mle, Boundary,
    LogLikelihood, MleOptions,
};
pub use stats::{sliding_window_stats, symbol_counts, SufficientStats};
