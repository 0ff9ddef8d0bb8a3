use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numdiff::compensated_sum;

/// Fisher information carried by the sample mean of `n` correlated values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMeanFisher {
    pub n: usize,
    /// `n (dmu)^2 / (sigma2 + 2 sum C_i)`.
    pub fisher: f64,
    /// `sigma2 + 2 sum_{i<n} C_i`.
    pub asymptotic_variance: f64,
    /// Exact `Var[Y] = sigma2 / n + (2 / n^2) sum (n - i) C_i`.
    pub exact_variance: f64,
    /// `(dmu)^2 / Var[Y]`, the exact Fisher information of a Gaussian `Y`.
    pub exact_fisher: f64,
}

/// `covariances[i - 1]` is the lag-`i` autocovariance, `i = 1..n-1`.
pub fn sample_mean_fisher(sigma2: f64, covariances: &[f64], dmu_dtheta: f64, n: usize) -> Result<SampleMeanFisher> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    if covariances.len() != n - 1 {
        return Err(Error::InvalidArgument(format!(
            "need {} autocovariances for n = {n}, got {}",
            n - 1,
            covariances.len()
        )));
    }
    let asymptotic_variance = sigma2 + 2.0 * compensated_sum(covariances.iter().copied());
    if !(asymptotic_variance > 0.0) {
        return Err(Error::InvalidVariance(asymptotic_variance));
    }
    let nf = n as f64;
    let weighted = compensated_sum(covariances.iter().enumerate().map(|(k, c)| (nf - (k + 1) as f64) * c));
    let exact_variance = sigma2 / nf + 2.0 * weighted / (nf * nf);
    if !(exact_variance > 0.0) {
        return Err(Error::InvalidVariance(exact_variance));
    }
    let d2 = dmu_dtheta * dmu_dtheta;
    Ok(SampleMeanFisher {
        n,
        fisher: nf * d2 / asymptotic_variance,
        asymptotic_variance,
        exact_variance,
        exact_fisher: d2 / exact_variance,
    })
}

/// Lags `1..n` of `gamma0 rho^i`.
pub fn ar1_autocovariances(gamma0: f64, rho: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    let mut c = gamma0;
    for _ in 1..n {
        c *= rho;
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::gaussian::{ar1_covariance, ar1_fisher_rate, ar1_window_fisher};
    use nalgebra::DVector;

    #[test]
    fn uncorrelated_reduces_to_iid() {
        let s = sample_mean_fisher(2.0, &[0.0; 9], 1.0, 10).unwrap();
        assert_eq!(s.fisher, 5.0);
        assert_eq!(s.exact_fisher, 5.0);
    }

    #[test]
    fn geometric_denominators() {
        // 1 + 2 rho / (1 - rho): 1/3 at rho = -0.5, 3 at rho = 0.5.
        let n = 4000;
        for (rho, denom) in [(-0.5, 1.0 / 3.0), (0.5, 3.0)] {
            let s = sample_mean_fisher(1.0, &ar1_autocovariances(1.0, rho, n), 1.0, n).unwrap();
            assert!((s.asymptotic_variance - denom).abs() < 1e-12);
            assert!((s.fisher / n as f64 - 1.0 / denom).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_variance_matches_quadratic_form() {
        let (g, rho, n) = (1.7, 0.6, 12);
        let s = sample_mean_fisher(g, &ar1_autocovariances(g, rho, n), 1.0, n).unwrap();
        let ones = DVector::from_element(n, 1.0 / n as f64);
        let var = (ar1_covariance(g, rho, n) * &ones).dot(&ones);
        assert!((s.exact_variance - var).abs() < 1e-14);
    }

    #[test]
    fn bounded_by_window_fisher() {
        for rho in [-0.9, -0.3, 0.0, 0.4, 0.9] {
            for n in [1, 5, 50] {
                let s = sample_mean_fisher(1.0, &ar1_autocovariances(1.0, rho, n), 1.0, n).unwrap();
                assert!(s.exact_fisher <= ar1_window_fisher(1.0, rho, n).unwrap() * (1.0 + 1e-12));
            }
            // The asymptotic per-sample sample-mean information is the rate itself.
            let n = 20000;
            let s = sample_mean_fisher(1.0, &ar1_autocovariances(1.0, rho, n), 1.0, n).unwrap();
            assert!(s.fisher / n as f64 <= ar1_fisher_rate(1.0, rho).unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(
            sample_mean_fisher(1.0, &[-1.0], 1.0, 2),
            Err(Error::InvalidVariance(-1.0))
        );
        assert!(sample_mean_fisher(1.0, &[0.1], 1.0, 3).is_err());
        assert!(sample_mean_fisher(1.0, &[], 1.0, 0).is_err());
    }
}
