use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::likelihood::{mle, uncorrelated_mle, MleOptions};
use super::stats::{symbol_counts, SufficientStats};
use crate::error::{Error, Result};
use crate::fisher::{ar1_fisher_rate, markov_decomposition, DerivativeScheme};
use crate::process::FiniteMarkovModel;
use crate::sampling::{replica_seed, sample_finite, sample_gaussian, GaussianMarkovModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorId {
    Mle,
    UncorrelatedMle,
    SampleMean,
}

impl EstimatorId {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorId::Mle => "mle",
            EstimatorId::UncorrelatedMle => "uncorrelated-mle",
            EstimatorId::SampleMean => "sample-mean",
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(EstimatorId::Mle),
            "uncorrelated-mle" => Ok(EstimatorId::UncorrelatedMle),
            "sample-mean" => Ok(EstimatorId::SampleMean),
            _ => Err(Error::InvalidArgument(format!(
                "unknown estimator '{s}' (expected mle, uncorrelated-mle or sample-mean)"
            ))),
        }
    }
}

/// Process a Monte-Carlo experiment samples from.
#[derive(Debug, Clone)]
pub enum ExperimentModel {
    Finite(FiniteMarkovModel),
    /// The mean `mu` is the estimated parameter.
    Gaussian(GaussianMarkovModel),
}

impl ExperimentModel {
    pub fn id(&self) -> &str {
        match self {
            ExperimentModel::Finite(m) => m.id(),
            ExperimentModel::Gaussian(g) => g.id(),
        }
    }

    pub fn theta_true(&self) -> f64 {
        match self {
            ExperimentModel::Finite(m) => m.theta()[0],
            ExperimentModel::Gaussian(g) => g.mu,
        }
    }

    /// `(F_{1:M}, f, M, F_1)` for the estimated parameter.
    fn fisher_curve(&self) -> Result<(f64, f64, usize, f64)> {
        match self {
            ExperimentModel::Finite(m) => {
                let order = m.order();
                let r = markov_decomposition(m, order + 1, DerivativeScheme::Analytic)?;
                let joint_m = if order == 0 { 0.0 } else { r.joint_at(order).expect("order >= 1").entries()[0] };
                Ok((joint_m, r.rate.entries()[0], order, r.f1.entries()[0]))
            }
            ExperimentModel::Gaussian(g) => {
                let f1 = 1.0 / g.gamma0;
                Ok((f1, ar1_fisher_rate(g.gamma0, g.rho)?, 1, f1))
            }
        }
    }
}

/// `n_points` integers spaced evenly in log10 between `lo` and `hi`.
pub fn log_grid(lo: usize, hi: usize, n_points: usize) -> Vec<usize> {
    if n_points < 2 {
        return vec![hi];
    }
    let (a, b) = ((lo as f64).log10(), (hi as f64).log10());
    let mut grid: Vec<usize> = (0..n_points)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n_points - 1) as f64).round() as usize)
        .collect();
    grid.dedup();
    grid
}

/// Ten points from 1e2 to 1e5.
pub fn default_n_grid() -> Vec<usize> {
    log_grid(100, 100_000, 10)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimationRun {
    pub estimator_id: EstimatorId,
    pub model_id: String,
    pub theta_true: f64,
    pub n_grid: Vec<usize>,
    pub replicas: usize,
    pub base_seed: u64,
    /// `per_replica_estimates[i][r]`: replica `r` at `n_grid[i]`.
    pub per_replica_estimates: Vec<Vec<f64>>,
    pub mse: Vec<f64>,
    pub mse_stderr: Vec<f64>,
    pub crb_markov: Vec<f64>,
    pub crb_iid: Vec<f64>,
}

/// One CSV row of an [`EstimationRun`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub mse: f64,
    pub mse_stderr: f64,
    pub crb_markov: f64,
    pub crb_iid: f64,
    pub estimator_id: String,
    pub model_id: String,
    pub theta_true: f64,
    pub replicas: usize,
}

impl EstimationRun {
    pub fn rows(&self) -> Vec<MseRow> {
        (0..self.n_grid.len())
            .map(|i| MseRow {
                n: self.n_grid[i],
                mse: self.mse[i],
                mse_stderr: self.mse_stderr[i],
                crb_markov: self.crb_markov[i],
                crb_iid: self.crb_iid[i],
                estimator_id: self.estimator_id.to_string(),
                model_id: self.model_id.clone(),
                theta_true: self.theta_true,
                replicas: self.replicas,
            })
            .collect()
    }
}

/// Mean and jackknife standard error of a sample.
pub fn jackknife_mean(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let total: f64 = values.iter().sum();
    let mean = total / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values
        .iter()
        .map(|v| {
            let loo = (total - v) / (n - 1.0);
            (loo - mean).powi(2)
        })
        .sum::<f64>()
        * (n - 1.0)
        / n;
    (mean, var.sqrt())
}

fn estimate_prefixes(
    model: &ExperimentModel,
    estimator: EstimatorId,
    n_grid: &[usize],
    seed: u64,
    options: MleOptions,
) -> Result<Vec<f64>> {
    let longest = *n_grid.iter().max().expect("non-empty grid");
    match (model, estimator) {
        (ExperimentModel::Finite(m), EstimatorId::Mle) => {
            let traj = sample_finite(m, longest, seed)?;
            let s = traj.symbols().expect("finite trajectory");
            n_grid
                .iter()
                .map(|&n| {
                    let stats = SufficientStats::from_symbols(&s[..n], m.alphabet(), m.order())?;
                    mle(&stats, m, None, options)
                })
                .collect()
        }
        (ExperimentModel::Finite(m), EstimatorId::UncorrelatedMle) => {
            let traj = sample_finite(m, longest, seed)?;
            let s = traj.symbols().expect("finite trajectory");
            n_grid
                .iter()
                .map(|&n| uncorrelated_mle(&symbol_counts(&s[..n], m.alphabet())?, m, None, options.tol))
                .collect()
        }
        (ExperimentModel::Gaussian(g), EstimatorId::SampleMean) => {
            let traj = sample_gaussian(g, longest, seed)?;
            let x = traj.reals().expect("real trajectory");
            Ok(n_grid.iter().map(|&n| x[..n].iter().sum::<f64>() / n as f64).collect())
        }
        (m, e) => Err(Error::InvalidArgument(format!(
            "estimator {e} does not apply to model {}",
            m.id()
        ))),
    }
}

/// Monte-Carlo MSE of an estimator along `n_grid`. Replica `r` draws one
/// trajectory of length `max(n_grid)` with seed `base_seed + r` and is
/// estimated on its prefixes; results do not depend on the thread count.
pub fn run_mse_experiment(
    model: &ExperimentModel,
    estimator: EstimatorId,
    n_grid: &[usize],
    replicas: usize,
    base_seed: u64,
) -> Result<EstimationRun> {
    run_mse_experiment_with(model, estimator, n_grid, replicas, base_seed, MleOptions::default())
}

pub fn run_mse_experiment_with(
    model: &ExperimentModel,
    estimator: EstimatorId,
    n_grid: &[usize],
    replicas: usize,
    base_seed: u64,
    options: MleOptions,
) -> Result<EstimationRun> {
    if replicas < 2 {
        return Err(Error::InvalidArgument("need at least 2 replicas".into()));
    }
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(Error::InvalidArgument("sample sizes must be positive".into()));
    }
    let (joint_m, rate, order, f1) = model.fisher_curve()?;
    if let Some(&n) = n_grid.iter().find(|&&n| n < order) {
        return Err(Error::TooShort { len: n, order });
    }
    let by_replica: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| estimate_prefixes(model, estimator, n_grid, replica_seed(base_seed, r), options))
        .collect::<Result<_>>()?;

    let theta = model.theta_true();
    let per_replica_estimates: Vec<Vec<f64>> = (0..n_grid.len())
        .map(|i| by_replica.iter().map(|rep| rep[i]).collect())
        .collect();
    let (mse, mse_stderr): (Vec<f64>, Vec<f64>) = per_replica_estimates
        .iter()
        .map(|est| {
            let sq: Vec<f64> = est.iter().map(|e| (e - theta).powi(2)).collect();
            jackknife_mean(&sq)
        })
        .unzip();
    let crb_markov = n_grid
        .iter()
        .map(|&n| {
            1.0 / (joint_m + (n - order) as f64 * rate)
        })
        .collect();
    let crb_iid = n_grid.iter().map(|&n| 1.0 / (n as f64 * f1)).collect();
    Ok(EstimationRun {
        estimator_id: estimator,
        model_id: model.id().to_string(),
        theta_true: theta,
        n_grid: n_grid.to_vec(),
        replicas,
        base_seed,
        per_replica_estimates,
        mse,
        mse_stderr,
        crb_markov,
        crb_iid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let g = default_n_grid();
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 100);
        assert_eq!(g[9], 100_000);
        assert_eq!(g[3], 1000);
    }

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let v = [1.0, 2.0, 4.0, 7.0];
        let (m, se) = jackknife_mean(&v);
        let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 3.0).sqrt();
        assert_eq!(m, 3.5);
        assert!((se - sd / 2.0).abs() < 1e-14);
    }

    #[test]
    fn estimator_names_roundtrip() {
        for e in [EstimatorId::Mle, EstimatorId::UncorrelatedMle, EstimatorId::SampleMean] {
            assert_eq!(e.as_str().parse::<EstimatorId>().unwrap(), e);
        }
        assert!("median".parse::<EstimatorId>().is_err());
    }

    #[test]
    fn mismatched_estimator_is_rejected() {
        let m = ExperimentModel::Finite(FiniteMarkovModel::builtin("toy-sub", &[0.5]).unwrap());
        assert!(run_mse_experiment(&m, EstimatorId::SampleMean, &[10], 2, 0).is_err());
        assert!(run_mse_experiment(&m, EstimatorId::Mle, &[10], 1, 0).is_err());
    }

    #[test]
    fn small_run_is_deterministic_and_aligned() {
        let m = ExperimentModel::Finite(FiniteMarkovModel::builtin("toy-super", &[0.7]).unwrap());
        let a = run_mse_experiment(&m, EstimatorId::Mle, &[50, 200], 8, 42).unwrap();
        let b = run_mse_experiment(&m, EstimatorId::Mle, &[50, 200], 8, 42).unwrap();
        assert_eq!(a.mse, b.mse);
        assert_eq!(a.rows().len(), 2);
        assert!(a.mse.iter().all(|&v| v >= 0.0));
        assert!(a.crb_markov[1] < a.crb_markov[0]);
    }

    #[test]
    fn gaussian_crb_curves() {
        let g = GaussianMarkovModel::new(1.0, 1.0, 0.5).unwrap();
        let run = run_mse_experiment(&ExperimentModel::Gaussian(g), EstimatorId::SampleMean, &[1, 10], 4, 0).unwrap();
        // F_{1:N} = 1 + (N - 1) (1 - rho) / (1 + rho) for gamma0 = 1.
        assert!((run.crb_markov[0] - 1.0).abs() < 1e-15);
        assert!((run.crb_markov[1] - 1.0 / (1.0 + 9.0 / 3.0)).abs() < 1e-14);
        assert!((run.crb_iid[1] - 0.1).abs() < 1e-15);
    }
}
