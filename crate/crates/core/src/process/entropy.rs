use serde::Serialize;

use super::model::FiniteMarkovModel;
use super::order::windows_up_to;
use crate::error::{Error, Result};

/// Block entropies of a stationary process and their linear asymptote.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    /// Entropy rate in nats per symbol.
    pub h: f64,
    /// Excess entropy in nats.
    pub excess: f64,
    /// `H(X_{1:n})` for `n = 1..=n_max`.
    pub joint_entropies: Vec<f64>,
    /// `max_n |H(X_{1:n}) - n h - E|` over `n >= M`.
    pub residual: f64,
}

impl EntropyReport {
    pub fn block_entropy(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.joint_entropies[n - 1]
        }
    }
}

/// Exact block entropies up to `n_max`, the rate `H(X_{M+1} | X_{1:M})`,
/// and the excess `H(X_{1:M}) - M h`.
pub fn entropy_report(model: &FiniteMarkovModel, n_max: usize) -> Result<EntropyReport> {
    let order = model.order();
    if n_max < order + 2 {
        return Err(Error::InvalidArgument(format!(
            "n_max must be at least order + 2 = {}",
            order + 2
        )));
    }
    let windows = windows_up_to(model, n_max)?;
    let block: Vec<f64> = windows.iter().map(|w| w.entropy()).collect();
    let h = block[order + 1] - block[order];
    let excess = block[order] - order as f64 * h;
    let residual = (order..=n_max)
        .map(|n| (block[n] - n as f64 * h - excess).abs())
        .fold(0.0, f64::max);
    Ok(EntropyReport {
        h,
        excess,
        joint_entropies: block[1..].to_vec(),
        residual,
    })
}
