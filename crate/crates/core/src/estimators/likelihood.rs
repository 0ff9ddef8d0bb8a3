use serde::{Deserialize, Serialize};

use super::stats::SufficientStats;
use crate::error::{Error, Result};
use crate::numdiff::compensated_sum;
use crate::process::{stationary_distribution, window_distribution, FiniteMarkovModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLikelihood {
    /// Including the log-probability of the first `order` symbols.
    pub full: f64,
    /// Window terms only.
    pub truncated: f64,
}

impl LogLikelihood {
    pub fn get(&self, boundary: Boundary) -> f64 {
        match boundary {
            Boundary::Exact => self.full,
            Boundary::Dropped => self.truncated,
        }
    }
}

/// Whether the likelihood keeps the first-`order`-symbols term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Exact,
    Dropped,
}

/// `sum_q f_q log P(q_last | q_head)` plus the exact boundary term.
/// Impossible data gives `-inf`.
pub fn log_likelihood(stats: &SufficientStats, model: &FiniteMarkovModel) -> Result<LogLikelihood> {
    if stats.order() != model.order() || stats.alphabet() != model.alphabet() {
        return Err(Error::InvalidArgument(format!(
            "statistics are for order {} over {} symbols, model has order {} over {}",
            stats.order(),
            stats.alphabet().size(),
            model.order(),
            model.alphabet().size()
        )));
    }
    let table = model.transition_table();
    let mut impossible = false;
    let truncated = compensated_sum(stats.counts().iter().zip(&table).filter_map(|(&c, &p)| {
        if c == 0 {
            None
        } else if p <= 0.0 {
            impossible = true;
            None
        } else {
            Some(c as f64 * p.ln())
        }
    }));
    if impossible {
        return Ok(LogLikelihood {
            full: f64::NEG_INFINITY,
            truncated: f64::NEG_INFINITY,
        });
    }
    let pi = stationary_distribution(model)?;
    let full = truncated + pi.prob(stats.boundary()).ln();
    Ok(LogLikelihood { full, truncated })
}

/// Search settings shared by both estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub tol: f64,
    pub boundary: Boundary,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            boundary: Boundary::Exact,
        }
    }
}

const PRESCAN: usize = 32;

/// Maximize `f` on `[lo, hi]`: a 32-point grid locates the best cell, then
/// golden-section search refines inside the neighbouring cells. Points
/// where `f` fails or is not finite count as `-inf`.
pub fn maximize_scalar(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad search interval [{lo}, {hi}]")));
    }
    let eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let step = (hi - lo) / (PRESCAN - 1) as f64;
    let grid: Vec<f64> = (0..PRESCAN).map(|i| if i + 1 == PRESCAN { hi } else { lo + i as f64 * step }).collect();
    let values: Vec<f64> = grid.iter().map(|&x| eval(x)).collect();
    let (best, &best_val) = values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    if best_val == f64::NEG_INFINITY {
        return Err(Error::NoFiniteLikelihood { lo, hi });
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(PRESCAN - 1)];
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d);
        }
    }
    let mid = 0.5 * (a + b);
    // The grid point wins when the optimum sits on a closed domain edge.
    Ok(if eval(mid) >= best_val { mid } else { grid[best] })
}

fn scalar_bounds(model: &FiniteMarkovModel, bounds: Option<(f64, f64)>) -> Result<(f64, f64)> {
    if model.num_params() != 1 {
        return Err(Error::InvalidArgument("maximum likelihood is implemented for scalar theta".into()));
    }
    Ok(bounds.unwrap_or(model.theta_domain()[0]))
}

/// Maximum-likelihood estimate of a scalar parameter from window counts.
/// `bounds` defaults to the model's domain.
pub fn mle(
    stats: &SufficientStats,
    model: &FiniteMarkovModel,
    bounds: Option<(f64, f64)>,
    options: MleOptions,
) -> Result<f64> {
    let (lo, hi) = scalar_bounds(model, bounds)?;
    maximize_scalar(
        |t| {
            model
                .with_theta(&[t])
                .and_then(|m| log_likelihood(stats, &m))
                .map_or(f64::NEG_INFINITY, |l| l.get(options.boundary))
        },
        lo,
        hi,
        options.tol,
    )
}

/// `sum_x n_x log P(X_1 = x)`: the likelihood that treats draws as independent.
pub fn uncorrelated_log_likelihood(counts: &[u64], model: &FiniteMarkovModel) -> Result<f64> {
    let marginal = window_distribution(model, 1)?;
    let mut total = 0.0;
    for (&n, &p) in counts.iter().zip(marginal.probs()) {
        if n == 0 {
            continue;
        }
        if p <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += n as f64 * p.ln();
    }
    Ok(total)
}

/// Estimate that fits the stationary one-site marginal to symbol counts.
pub fn uncorrelated_mle(
    counts: &[u64],
    model: &FiniteMarkovModel,
    bounds: Option<(f64, f64)>,
    tol: f64,
) -> Result<f64> {
    if counts.len() != model.alphabet().size() {
        return Err(Error::InvalidArgument("one count per symbol expected".into()));
    }
    let (lo, hi) = scalar_bounds(model, bounds)?;
    maximize_scalar(
        |t| {
            model
                .with_theta(&[t])
                .and_then(|m| uncorrelated_log_likelihood(counts, &m))
                .unwrap_or(f64::NEG_INFINITY)
        },
        lo,
        hi,
        tol,
    )
}
