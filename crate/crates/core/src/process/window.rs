use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::model::{Alphabet, FiniteMarkovModel};
use crate::error::{Error, Result};
use crate::linalg::stationary_vector;

/// Largest number of joint entries enumerated by default (2^24).
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 24;

/// Joint law of `n` consecutive symbols of a stationary process.
///
/// Entries are indexed by the base-`d` code of the word, oldest symbol first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowDistribution {
    alphabet: Alphabet,
    len: usize,
    probs: Vec<f64>,
}

impl WindowDistribution {
    pub fn new(alphabet: Alphabet, len: usize, probs: Vec<f64>) -> Result<Self> {
        let expected = alphabet
            .words(len)
            .ok_or_else(|| Error::InvalidArgument("window too long".into()))?;
        if probs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "window of length {len} needs {expected} entries, got {}",
                probs.len()
            )));
        }
        Ok(Self {
            alphabet,
            len,
            probs,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, word: &[usize]) -> f64 {
        assert_eq!(word.len(), self.len);
        self.probs[self.alphabet.encode(word)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Sum out the newest symbol.
    pub fn marginalize_last(&self) -> WindowDistribution {
        let d = self.alphabet.size();
        let probs = self.probs.chunks(d).map(|c| c.iter().sum()).collect();
        WindowDistribution {
            alphabet: self.alphabet,
            len: self.len.saturating_sub(1),
            probs,
        }
    }

    /// Sum out the oldest symbol.
    pub fn marginalize_first(&self) -> WindowDistribution {
        let d = self.alphabet.size();
        let stride = self.probs.len() / d;
        let probs = (0..stride)
            .map(|i| (0..d).map(|s| self.probs[s * stride + i]).sum())
            .collect();
        WindowDistribution {
            alphabet: self.alphabet,
            len: self.len.saturating_sub(1),
            probs,
        }
    }

    /// Largest entrywise difference with another window of the same shape.
    pub fn max_abs_diff(&self, other: &WindowDistribution) -> f64 {
        assert_eq!(self.probs.len(), other.probs.len());
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Shannon entropy in nats, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }
}

fn check_cap(alphabet: Alphabet, n: usize, cap: usize) -> Result<usize> {
    match alphabet.words(n) {
        Some(k) if k <= cap => Ok(k),
        _ => Err(Error::SizeOverflow {
            entries: (alphabet.size() as u128).saturating_pow(n as u32),
            cap,
        }),
    }
}

/// Row-stochastic matrix of the chain lifted to histories of length `order`.
fn lifted_matrix(alphabet: Alphabet, table: &[f64]) -> DMatrix<f64> {
    let d = alphabet.size();
    let states = table.len() / d;
    let mut p = DMatrix::zeros(states, states);
    for h in 0..states {
        for x in 0..d {
            let next = (h * d + x) % states;
            p[(h, next)] += table[h * d + x];
        }
    }
    p
}

fn stationary_from_table(alphabet: Alphabet, order: usize, table: &[f64]) -> Result<Vec<f64>> {
    if order == 0 {
        return Ok(vec![1.0]);
    }
    stationary_vector(&lifted_matrix(alphabet, table))
}

/// Unique stationary law over histories of length `order`.
pub fn stationary_distribution(model: &FiniteMarkovModel) -> Result<WindowDistribution> {
    let alphabet = model.alphabet();
    check_cap(alphabet, model.order(), DEFAULT_ENUMERATION_CAP)?;
    let pi = stationary_from_table(alphabet, model.order(), &model.transition_table())?;
    WindowDistribution::new(alphabet, model.order(), pi)
}

/// Exact joint law of `n` consecutive symbols.
pub fn window_distribution(model: &FiniteMarkovModel, n: usize) -> Result<WindowDistribution> {
    window_distribution_capped(model, n, DEFAULT_ENUMERATION_CAP)
}

pub fn window_distribution_capped(
    model: &FiniteMarkovModel,
    n: usize,
    cap: usize,
) -> Result<WindowDistribution> {
    let probs = window_probs(model, &model.transition_table(), n, cap)?;
    WindowDistribution::new(model.alphabet(), n, probs)
}

/// Window probabilities for a given transition table (shared by the
/// finite-difference Fisher path, which perturbs theta).
pub(crate) fn window_probs(
    model: &FiniteMarkovModel,
    table: &[f64],
    n: usize,
    cap: usize,
) -> Result<Vec<f64>> {
    let alphabet = model.alphabet();
    let order = model.order();
    check_cap(alphabet, n, cap)?;
    check_cap(alphabet, order, cap)?;
    let pi = stationary_from_table(alphabet, order, table)?;
    Ok(extend(alphabet, order, table, pi, n))
}

fn extend(alphabet: Alphabet, order: usize, table: &[f64], pi: Vec<f64>, n: usize) -> Vec<f64> {
    let d = alphabet.size();
    if n <= order {
        let group = d.pow((order - n) as u32);
        return pi.chunks(group).map(|c| c.iter().sum()).collect();
    }
    let states = pi.len();
    let mut probs = pi;
    for _ in order..n {
        let mut next = Vec::with_capacity(probs.len() * d);
        for (code, &p) in probs.iter().enumerate() {
            let h = code % states;
            for x in 0..d {
                next.push(p * table[h * d + x]);
            }
        }
        probs = next;
    }
    probs
}

/// Window probabilities together with their exact theta-gradient, obtained
/// from the analytic transition derivative and the linearized stationary
/// equation `d_pi (I - P) = pi dP`.
pub(crate) fn window_with_analytic_gradient(
    model: &FiniteMarkovModel,
    n: usize,
    cap: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let alphabet = model.alphabet();
    let d = alphabet.size();
    let order = model.order();
    check_cap(alphabet, n, cap)?;
    check_cap(alphabet, order, cap)?;
    let table = model.transition_table();
    let pi = stationary_from_table(alphabet, order, &table)?;
    let grads = model.transition_gradient();

    let mut probs = pi.clone();
    let mut dprobs: Vec<Vec<f64>> = Vec::with_capacity(grads.len());
    for dtable in &grads {
        dprobs.push(stationary_derivative(alphabet, order, &table, dtable, &pi)?);
    }

    if n <= order {
        let group = d.pow((order - n) as u32);
        let fold = |v: &[f64]| v.chunks(group).map(|c| c.iter().sum()).collect::<Vec<f64>>();
        return Ok((fold(&probs), dprobs.iter().map(|g| fold(g)).collect()));
    }

    let states = pi.len();
    for _ in order..n {
        let mut next = Vec::with_capacity(probs.len() * d);
        let mut dnext: Vec<Vec<f64>> = vec![Vec::with_capacity(probs.len() * d); grads.len()];
        for (code, &p) in probs.iter().enumerate() {
            let h = code % states;
            for x in 0..d {
                let c = table[h * d + x];
                next.push(p * c);
                for (k, dtable) in grads.iter().enumerate() {
                    dnext[k].push(dprobs[k][code] * c + p * dtable[h * d + x]);
                }
            }
        }
        probs = next;
        dprobs = dnext;
    }
    Ok((probs, dprobs))
}

fn stationary_derivative(
    alphabet: Alphabet,
    order: usize,
    table: &[f64],
    dtable: &[f64],
    pi: &[f64],
) -> Result<Vec<f64>> {
    if order == 0 {
        return Ok(vec![0.0]);
    }
    let p = lifted_matrix(alphabet, table);
    let dp = lifted_matrix(alphabet, dtable);
    let n = p.nrows();
    let pi_row = DVector::from_column_slice(pi);
    let rhs_full = dp.transpose() * &pi_row;
    let mut a = DMatrix::<f64>::identity(n, n) - p.transpose();
    let mut rhs = rhs_full;
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    rhs[n - 1] = 0.0;
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NonErgodic("stationary derivative system is singular".into()))?;
    Ok(sol.iter().copied().collect())
}
