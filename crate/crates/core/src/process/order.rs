use serde::Serialize;

use super::model::FiniteMarkovModel;
use super::window::{window_distribution, WindowDistribution};
use crate::error::{Error, Result};

/// Histories whose probability falls below this are skipped: conditionals
/// on null sets are undefined.
pub const NULL_HISTORY: f64 = 1e-12;

/// Outcome of checking a claimed Markov order against exact windows.
#[derive(Debug, Clone, Serialize)]
pub struct MarkovOrderCheck {
    pub claimed: usize,
    pub probe_depth: usize,
    /// Largest `|P(x | full history) - P(x | last `claimed` symbols)|`.
    pub max_deviation: f64,
    /// Same deviation for `claimed - 1`; `None` when `claimed == 0`.
    pub lower_order_deviation: Option<f64>,
    pub sufficient: bool,
    pub minimal: bool,
}

impl MarkovOrderCheck {
    /// The claimed order truncates every conditional and no shorter one does.
    pub fn verified(&self) -> bool {
        self.sufficient && self.minimal
    }
}

/// Largest gap between conditionals on the full past and on the last
/// `order` symbols, over history lengths `order..=probe_depth`.
///
/// `windows[n]` must hold the length-`n` window for `n = 0..=probe_depth + 1`.
pub fn conditional_deviation(windows: &[WindowDistribution], order: usize, probe_depth: usize) -> f64 {
    assert!(windows.len() > probe_depth + 1, "need windows up to probe_depth + 1");
    let alphabet = windows[0].alphabet();
    let d = alphabet.size();
    let short_hist = &windows[order];
    let short_joint = &windows[order + 1];
    let mut worst = 0.0f64;
    for n in order.max(1)..=probe_depth {
        let hist = &windows[n];
        let joint = &windows[n + 1];
        let tail_words = alphabet.words(order).unwrap_or(1);
        for (h_code, &ph) in hist.probs().iter().enumerate() {
            if ph <= NULL_HISTORY {
                continue;
            }
            // The last `order` symbols of the history are its low-order digits.
            let tail = h_code % tail_words;
            let p_tail = short_hist.probs()[tail];
            if p_tail <= NULL_HISTORY {
                continue;
            }
            for x in 0..d {
                let full = joint.probs()[h_code * d + x] / ph;
                let truncated = short_joint.probs()[tail * d + x] / p_tail;
                worst = worst.max((full - truncated).abs());
            }
        }
    }
    worst
}

/// Check a claimed order from a window sequence (see [`conditional_deviation`]).
pub fn check_order_from_windows(
    windows: &[WindowDistribution],
    claimed: usize,
    probe_depth: usize,
    tol: f64,
) -> MarkovOrderCheck {
    let max_deviation = conditional_deviation(windows, claimed, probe_depth);
    let lower_order_deviation =
        (claimed > 0).then(|| conditional_deviation(windows, claimed - 1, probe_depth));
    MarkovOrderCheck {
        claimed,
        probe_depth,
        max_deviation,
        lower_order_deviation,
        sufficient: max_deviation <= tol,
        minimal: lower_order_deviation.is_none_or(|dev| dev > tol),
    }
}

/// Smallest order whose truncated conditionals match the full ones within `tol`.
pub fn measure_order_from_windows(
    windows: &[WindowDistribution],
    max_order: usize,
    probe_depth: usize,
    tol: f64,
) -> Option<usize> {
    (0..=max_order).find(|&l| conditional_deviation(windows, l, probe_depth) <= tol)
}

/// Windows of lengths `0..=max_len` of a finite model.
pub fn windows_up_to(model: &FiniteMarkovModel, max_len: usize) -> Result<Vec<WindowDistribution>> {
    (0..=max_len).map(|n| window_distribution(model, n)).collect()
}

/// Verify that `claimed` is the Markov order of `model`.
pub fn verify_markov_order(
    model: &FiniteMarkovModel,
    claimed: usize,
    probe_depth: usize,
    tol: f64,
) -> Result<MarkovOrderCheck> {
    if probe_depth < claimed + 1 {
        return Err(Error::InvalidArgument(format!(
            "probe depth {probe_depth} must be at least claimed order + 1 = {}",
            claimed + 1
        )));
    }
    let windows = windows_up_to(model, probe_depth + 1)?;
    Ok(check_order_from_windows(&windows, claimed, probe_depth, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_sub_has_order_one() {
        let m = FiniteMarkovModel::builtin("toy-sub", &[0.5]).unwrap();
        let check = verify_markov_order(&m, 1, 4, 1e-10).unwrap();
        assert!(check.verified(), "{check:?}");
        assert!(check.max_deviation < 1e-14);
    }

    #[test]
    fn bernoulli_has_order_zero() {
        let m = FiniteMarkovModel::builtin("iid-bernoulli", &[0.3]).unwrap();
        assert!(verify_markov_order(&m, 0, 3, 1e-10).unwrap().verified());
        let one = verify_markov_order(&m, 1, 3, 1e-10).unwrap();
        assert!(one.sufficient);
        assert!(!one.minimal);
        assert!(!one.verified());
    }

    #[test]
    fn order_two_model_needs_two_symbols() {
        let m = FiniteMarkovModel::builtin("order-two", &[0.5]).unwrap();
        assert!(verify_markov_order(&m, 2, 5, 1e-10).unwrap().verified());
        let one = verify_markov_order(&m, 1, 5, 1e-10).unwrap();
        assert!(!one.sufficient);
    }

    #[test]
    fn every_shipped_model_passes_at_true_order_and_fails_one_below() {
        let cases: [(&str, &[f64], usize); 4] = [
            ("toy-sub", &[0.3], 1),
            ("toy-super", &[0.7], 1),
            ("two-param", &[0.2, 0.6], 1),
            ("order-two", &[0.8], 2),
        ];
        for (name, theta, order) in cases {
            let m = FiniteMarkovModel::builtin(name, theta).unwrap();
            assert!(verify_markov_order(&m, order, order + 3, 1e-10).unwrap().verified(), "{name}");
            assert!(!verify_markov_order(&m, order - 1, order + 3, 1e-10).unwrap().sufficient, "{name}");
        }
    }

    #[test]
    fn probe_depth_must_exceed_claim() {
        let m = FiniteMarkovModel::builtin("toy-sub", &[0.5]).unwrap();
        assert!(verify_markov_order(&m, 2, 2, 1e-10).is_err());
    }

    #[test]
    fn measured_order_matches() {
        let m = FiniteMarkovModel::builtin("order-two", &[0.3]).unwrap();
        let w = windows_up_to(&m, 6).unwrap();
        assert_eq!(measure_order_from_windows(&w, 4, 5, 1e-10), Some(2));
    }
}
