use serde::Serialize;

use super::marginal::marginal;
use super::SpinChainModel;
use crate::error::{Error, Result};
use crate::process::{conditional_deviation, measure_order_from_windows, WindowDistribution};

#[derive(Debug, Clone, Serialize)]
pub struct ChainOrderCheck {
    pub range: usize,
    /// The interaction range, or 0 for free spins.
    pub expected: usize,
    /// Smallest order that truncates every conditional within the tolerance.
    pub measured: Option<usize>,
    /// Conditional gap when truncating to the interaction range.
    pub deviation_at_range: f64,
    /// `max |P(s1 s2) - P(s1) P(s2)|` over neighbouring pairs.
    pub factorization_defect: f64,
}

impl ChainOrderCheck {
    pub fn verified(&self) -> bool {
        self.measured == Some(self.expected)
    }
}

/// Measure the Markov order of the spin sequence from exact marginals up to
/// `2R + 2` spins and check that neighbours are correlated whenever a
/// coupling is switched on.
pub fn verify_chain_markov_order(model: &SpinChainModel, tol: f64) -> Result<ChainOrderCheck> {
    let r = model.range();
    let max_len = 2 * r + 2;
    let windows: Vec<WindowDistribution> = (0..=max_len).map(|m| marginal(model, m)).collect::<Result<_>>()?;
    let probe = max_len - 1;
    let measured = measure_order_from_windows(&windows, probe, probe, tol);
    let deviation_at_range = conditional_deviation(&windows, r, probe);

    let p1 = windows[1].probs();
    let factorization_defect = windows[2]
        .probs()
        .iter()
        .enumerate()
        .map(|(code, p)| (p - p1[code / 2] * p1[code % 2]).abs())
        .fold(0.0, f64::max);
    if !model.is_free() && model.couplings()[0] != 0.0 && factorization_defect == 0.0 {
        return Err(Error::Numeric("coupled neighbours factorize exactly".into()));
    }
    Ok(ChainOrderCheck {
        range: r,
        expected: if model.is_free() { 0 } else { r },
        measured,
        deviation_at_range,
        factorization_defect,
    })
}
