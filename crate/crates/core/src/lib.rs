//! Exact Fisher information of stationary finite-Markov-order processes.
//!
//! The crate is organized bottom-up:
//!
//! - [`process`]: parameterized finite-alphabet processes, exact window
//!   distributions, Markov-order verification and block entropies.
//! - [`fisher`]: joint and conditional Fisher information matrices, the
//!   rate/excess decomposition, Gaussian closed forms and the sample-mean bound.
//! - [`sampling`]: seeded trajectories of finite chains and the Gaussian
//!   Markov chain.
//! - [`estimators`]: sliding-window likelihoods, maximum likelihood and the
//!   Monte-Carlo MSE harness against Cramér-Rao curves.
//! - [`spinchain`]: transfer-matrix thermometry of classical Ising chains.

pub mod error;
pub mod estimators;
pub mod fisher;
pub mod linalg;
pub mod numdiff;
pub mod process;
pub mod sampling;
pub mod spinchain;

pub use error::{Error, Result};
