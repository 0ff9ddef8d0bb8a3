use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{rng_from_seed, Trajectory, Values};
use crate::error::{Error, Result};

/// Stationary Gaussian AR(1) chain: `X_1 ~ N(mu, gamma0)` and
/// `X_{k+1} | X_k ~ N(mu + rho (X_k - mu), gamma0 (1 - rho^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMarkovModel {
    pub mu: f64,
    pub gamma0: f64,
    pub rho: f64,
}

impl GaussianMarkovModel {
    pub fn new(mu: f64, gamma0: f64, rho: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("mean must be finite, got {mu}")));
        }
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidArgument(format!("variance must be positive, got {gamma0}")));
        }
        if !(rho.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!("correlation must lie in [-1, 1], got {rho}")));
        }
        Ok(Self { mu, gamma0, rho })
    }

    pub fn id(&self) -> &'static str {
        "gaussian-markov"
    }

    pub fn theta(&self) -> Vec<f64> {
        vec![self.mu, self.gamma0, self.rho]
    }

    pub fn conditional_variance(&self) -> f64 {
        (self.gamma0 * (1.0 - self.rho * self.rho)).max(0.0)
    }

    /// Lag-`k` autocovariance `gamma0 rho^k`.
    pub fn autocovariance(&self, k: usize) -> f64 {
        self.gamma0 * self.rho.powi(k as i32)
    }
}

pub fn sample_gaussian(model: &GaussianMarkovModel, length: usize, seed: u64) -> Result<Trajectory> {
    if length == 0 {
        return Err(Error::InvalidArgument("trajectory length must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let sd0 = model.gamma0.sqrt();
    let sd = model.conditional_variance().sqrt();
    let mut values = Vec::with_capacity(length);
    let z: f64 = rng.sample(StandardNormal);
    let mut x = model.mu + sd0 * z;
    values.push(x);
    for _ in 1..length {
        let z: f64 = rng.sample(StandardNormal);
        x = model.mu + model.rho * (x - model.mu) + sd * z;
        values.push(x);
    }
    Ok(Trajectory {
        values: Values::Reals(values),
        seed,
        model_id: model.id().to_string(),
        theta: model.theta(),
    })
}

/// Coefficients `b` of `E[X_last | X_rest] = mu_last + b . (x_rest - mu_rest)`
/// for a Gaussian with covariance `sigma`.
pub fn conditional_mean_coefficients(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = sigma.nrows();
    if n < 2 || sigma.ncols() != n {
        return Err(Error::InvalidArgument("need a square covariance of size >= 2".into()));
    }
    if sigma.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    let rest = sigma.view((0, 0), (n - 1, n - 1)).into_owned();
    let cross = DVector::from_iterator(n - 1, (0..n - 1).map(|i| sigma[(i, n - 1)]));
    let chol = rest.cholesky().ok_or(Error::NotPositiveDefinite)?;
    Ok(chol.solve(&cross).iter().copied().collect())
}

fn first_coefficient(sigma: DMatrix<f64>) -> Result<f64> {
    Ok(conditional_mean_coefficients(&sigma)?[0].abs())
}

/// `|d E[X_3 | X_2, X_1] / d X_1|` for the tridiagonal covariance
/// `gamma0 [[1, rho, 0], [rho, 1, rho], [0, rho, 1]]`. Nonzero means the
/// triple is not order-1 Markov.
pub fn tridiagonal_gaussian_conditional_check(rho: f64, gamma0: f64) -> Result<f64> {
    let sigma = DMatrix::from_row_slice(3, 3, &[1.0, rho, 0.0, rho, 1.0, rho, 0.0, rho, 1.0]) * gamma0;
    first_coefficient(sigma)
}

/// The same measure for the AR(1) covariance `gamma0 rho^|i-j|`.
pub fn geometric_gaussian_conditional_check(rho: f64, gamma0: f64) -> Result<f64> {
    first_coefficient(crate::fisher::ar1_covariance(gamma0, rho, 3))
}
