use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean-parameter Fisher information of a correlated Gaussian pair
/// `(X, Y)` with common mean, variance `gamma0` and correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPairFisher {
    pub joint: f64,
    pub marginal: f64,
    /// `joint / (2 marginal)`, equal to `1 / (1 + rho)`.
    pub ratio: f64,
}

fn check_gamma0(gamma0: f64) -> Result<()> {
    if gamma0 > 0.0 && gamma0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("variance must be positive, got {gamma0}")))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho == -1.0 {
        return Err(Error::SingularCovariance);
    }
    if rho > -1.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("correlation must lie in (-1, 1], got {rho}")))
    }
}

/// The mean only enters through its derivative, which is one.
pub fn gaussian_pair_fisher(mu: f64, gamma0: f64, rho: f64) -> Result<GaussianPairFisher> {
    if !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("mean must be finite, got {mu}")));
    }
    check_gamma0(gamma0)?;
    check_rho(rho)?;
    let marginal = 1.0 / gamma0;
    let joint = (2.0 / gamma0) / (1.0 + rho);
    Ok(GaussianPairFisher {
        joint,
        marginal,
        ratio: 1.0 / (1.0 + rho),
    })
}

/// Scalar-parameter Fisher information of `N(mu(theta), sigma(theta))`:
/// `dmu' sigma^-1 dmu + tr(sigma^-1 dsigma sigma^-1 dsigma) / 2`.
pub fn gaussian_fisher(dmu: &DVector<f64>, sigma: &DMatrix<f64>, dsigma: Option<&DMatrix<f64>>) -> Result<f64> {
    let n = sigma.nrows();
    if sigma.ncols() != n || dmu.len() != n {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let chol = sigma.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let mut f = dmu.dot(&chol.solve(dmu));
    if let Some(ds) = dsigma {
        let a = chol.solve(ds);
        f += 0.5 * (&a * &a).trace();
    }
    Ok(f)
}

/// Covariance `gamma0 rho^|i-j|` of `n` consecutive AR(1) values.
pub fn ar1_covariance(gamma0: f64, rho: f64, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| gamma0 * rho.powi(i.abs_diff(j) as i32))
}

fn check_ar1(gamma0: f64, rho: f64) -> Result<()> {
    check_gamma0(gamma0)?;
    if rho.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("AR(1) needs |rho| < 1, got {rho}")))
    }
}

/// Mean Fisher rate of a stationary AR(1) chain.
pub fn ar1_fisher_rate(gamma0: f64, rho: f64) -> Result<f64> {
    check_ar1(gamma0, rho)?;
    Ok((1.0 - rho) / (gamma0 * (1.0 + rho)))
}

/// Mean Fisher information of `n` consecutive AR(1) values,
/// `F_1 + (n - 1) f` with `F_1 = 1 / gamma0`.
pub fn ar1_window_fisher(gamma0: f64, rho: f64, n: usize) -> Result<f64> {
    check_ar1(gamma0, rho)?;
    if n == 0 {
        return Ok(0.0);
    }
    Ok(1.0 / gamma0 + (n - 1) as f64 * ar1_fisher_rate(gamma0, rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_examples() {
        let g = gaussian_pair_fisher(0.0, 1.0, 0.0).unwrap();
        assert_eq!((g.joint, g.ratio), (2.0, 1.0));
        let g = gaussian_pair_fisher(0.0, 1.0, 1.0).unwrap();
        assert_eq!(g.joint, g.marginal);
        let g = gaussian_pair_fisher(3.0, 2.0, -0.5).unwrap();
        assert!((g.joint - 2.0).abs() < 1e-15);
        assert!((g.ratio - 2.0).abs() < 1e-15);
        assert_eq!(gaussian_pair_fisher(0.0, 1.0, -1.0), Err(Error::SingularCovariance));
        assert!(gaussian_pair_fisher(0.0, 0.0, 0.3).is_err());
        assert!(gaussian_pair_fisher(0.0, 1.0, 1.5).is_err());
    }

    // Oracle: integrate p (d_mu log p)^2 on a grid, with the score taken
    // by differencing the log density in mu.
    fn pair_by_quadrature(gamma0: f64, rho: f64) -> f64 {
        let det = gamma0 * gamma0 * (1.0 - rho * rho);
        let logp = |x: f64, y: f64, mu: f64| {
            let (a, b) = (x - mu, y - mu);
            let q = (gamma0 * a * a - 2.0 * rho * gamma0 * a * b + gamma0 * b * b) / det;
            -0.5 * q - (2.0 * std::f64::consts::PI).ln() - 0.5 * det.ln()
        };
        let (h, dmu) = (0.01, 1e-5);
        let lim = 9.0 * gamma0.sqrt();
        let steps = (2.0 * lim / h) as i64;
        let mut acc = 0.0;
        for i in 0..=steps {
            let x = -lim + i as f64 * h;
            for j in 0..=steps {
                let y = -lim + j as f64 * h;
                let s = (logp(x, y, dmu) - logp(x, y, -dmu)) / (2.0 * dmu);
                acc += logp(x, y, 0.0).exp() * s * s;
            }
        }
        acc * h * h
    }

    #[test]
    fn pair_matches_quadrature() {
        for rho in [-0.5, 0.0, 0.6] {
            let want = pair_by_quadrature(1.3, rho);
            let got = gaussian_pair_fisher(0.0, 1.3, rho).unwrap().joint;
            assert!((got - want).abs() < 1e-6 * want, "rho {rho}: {got} vs {want}");
        }
    }

    #[test]
    fn general_form_reduces_to_pair() {
        let sigma = ar1_covariance(2.0, -0.3, 2);
        let f = gaussian_fisher(&DVector::from_element(2, 1.0), &sigma, None).unwrap();
        assert!((f - gaussian_pair_fisher(0.0, 2.0, -0.3).unwrap().joint).abs() < 1e-14);
    }

    #[test]
    fn variance_parameter_trace_term() {
        // N(0, theta) has F = 1 / (2 theta^2).
        let s = DMatrix::from_element(1, 1, 2.0);
        let ds = DMatrix::from_element(1, 1, 1.0);
        let f = gaussian_fisher(&DVector::zeros(1), &s, Some(&ds)).unwrap();
        assert!((f - 0.125).abs() < 1e-15);
    }

    #[test]
    fn ar1_window_matches_matrix_inverse() {
        for rho in [-0.9, -0.5, 0.0, 0.5, 0.9] {
            for n in 1..8 {
                let sigma = ar1_covariance(1.5, rho, n);
                let direct = gaussian_fisher(&DVector::from_element(n, 1.0), &sigma, None).unwrap();
                let closed = ar1_window_fisher(1.5, rho, n).unwrap();
                assert!((direct - closed).abs() < 1e-9 * direct, "rho {rho} n {n}");
            }
        }
    }

    #[test]
    fn singular_covariance_is_not_positive_definite() {
        let sigma = ar1_covariance(1.0, 1.0, 3);
        assert_eq!(
            gaussian_fisher(&DVector::from_element(3, 1.0), &sigma, None),
            Err(Error::NotPositiveDefinite)
        );
    }
}
