//! Fisher information of finite windows: exact enumeration for finite
//! Markov models, closed forms for Gaussian means, and the sample-mean bound.

mod exact;
mod gaussian;
mod matrix;
mod sample_mean;
mod xi;

pub use exact::{
    conditional_fisher, joint_fisher, markov_decomposition, DerivativeScheme, FisherReport,
    NEGLIGIBLE_PROB,
};
pub use gaussian::{
    ar1_covariance, ar1_fisher_rate, ar1_window_fisher, gaussian_fisher, gaussian_pair_fisher,
    GaussianPairFisher,
};
pub use matrix::FisherMatrix;
pub use sample_mean::{ar1_autocovariances, sample_mean_fisher, SampleMeanFisher};
pub use xi::{xi_ratio, Xi, XI_ZERO};

pub(crate) use exact::{conditional_from_gradients, fisher_from_gradient, WindowGradient};
