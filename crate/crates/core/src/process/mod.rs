//! Stationary finite-alphabet processes of finite Markov order: exact
//! window distributions, Markov-order checks and block entropies.

mod entropy;
mod model;
mod order;
mod spec;
mod window;

pub use entropy::{entropy_report, EntropyReport};
pub use model::{Alphabet, Family, FiniteMarkovModel};
pub use order::{
    check_order_from_windows, conditional_deviation, measure_order_from_windows,
    verify_markov_order, windows_up_to, MarkovOrderCheck, NULL_HISTORY,
};
pub use spec::{ModelKind, ModelSpec};
pub use window::{
    stationary_distribution, window_distribution, window_distribution_capped,
    WindowDistribution, DEFAULT_ENUMERATION_CAP,
};

pub(crate) use window::{window_probs, window_with_analytic_gradient};
