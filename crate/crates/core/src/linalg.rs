//! Small dense linear-algebra routines: stationary vectors of stochastic
//! matrices and the Perron pair of positive transfer matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const UNIT_CIRCLE_TOL: f64 = 1e-10;
const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITERS: usize = 1_000_000;

/// Stationary row vector `pi` of a row-stochastic matrix (`pi P = pi`).
///
/// The chain must have exactly one eigenvalue on the unit circle; a repeated
/// unit eigenvalue (reducible) or another eigenvalue of modulus one
/// (periodic) is reported as [`Error::NonErgodic`].
pub fn stationary_vector(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let on_circle = p
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.norm() > 1.0 - UNIT_CIRCLE_TOL)
        .count();
    if on_circle != 1 {
        return Err(Error::NonErgodic(format!(
            "{on_circle} eigenvalues on the unit circle"
        )));
    }

    // Bordered system: (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    let mut a = p.transpose() - DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = nalgebra::DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let solved = a.lu().solve(&rhs).map(|v| v.iter().copied().collect::<Vec<_>>());
    match solved {
        Some(pi) if pi.iter().all(|&x| x.is_finite() && x > -1e-12) => Ok(clean(pi)),
        _ => power_stationary(p),
    }
}

fn power_stationary(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..POWER_MAX_ITERS {
        let mut next = vec![0.0; n];
        for (i, &w) in pi.iter().enumerate() {
            for (j, slot) in next.iter_mut().enumerate() {
                *slot += w * p[(i, j)];
            }
        }
        let change: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if change < POWER_TOL {
            return Ok(clean(pi));
        }
    }
    Err(Error::Numeric(
        "power iteration for the stationary vector did not converge".into(),
    ))
}

fn clean(mut pi: Vec<f64>) -> Vec<f64> {
    for x in pi.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    pi
}

/// Dominant eigen-pair of an entrywise non-negative, primitive matrix.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub lambda: f64,
    /// Left eigenvector, scaled so that `left . right = 1`.
    pub left: Vec<f64>,
    /// Right eigenvector, summing to one.
    pub right: Vec<f64>,
    /// `1 - |lambda_2| / lambda`.
    pub gap: f64,
}

/// Power iteration for the Perron pair.
///
/// The iteration runs on repeated squares of `A = V / max(V) + I` (rescaled
/// each step) followed by a few plain `A v` sweeps. The identity shift
/// pushes eigenvalues near `-lambda` (antiferromagnetic chains at low
/// temperature) away from the dominant one; without it the squares round
/// away the eigenvector. Only sums of non-negative terms appear, so small
/// eigenvector components keep full relative precision.
pub fn perron_pair(v: &DMatrix<f64>) -> Result<PerronPair> {
    let n = v.nrows();
    if v.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::Numeric("transfer matrix has invalid entries".into()));
    }
    let scale = v.max();
    if scale <= 0.0 {
        return Err(Error::Numeric("transfer matrix is identically zero".into()));
    }
    let shifted = v / scale + DMatrix::<f64>::identity(n, n);
    let mut a = shifted.clone();
    for _ in 0..64 {
        let mut sq = &a * &a;
        let m = sq.max();
        sq /= m;
        let converged = sq
            .iter()
            .zip(a.iter())
            .all(|(x, y)| (x - y).abs() <= 1e-15 * x.abs().max(y.abs()).max(1e-300));
        a = sq;
        if converged {
            break;
        }
    }
    let mut right: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let mut left: Vec<f64> = (0..n).map(|j| a.column(j).sum()).collect();
    normalize_sum(&mut right);
    normalize_sum(&mut left);

    for _ in 0..8 {
        right = apply(&shifted, &right, false);
        normalize_sum(&mut right);
        left = apply(&shifted, &left, true);
        normalize_sum(&mut left);
    }
    let vr = apply(v, &right, false);
    let num: f64 = left.iter().zip(&vr).map(|(l, x)| l * x).sum();
    let dot: f64 = left.iter().zip(&right).map(|(l, r)| l * r).sum();
    if !(dot > 0.0) {
        return Err(Error::Numeric("dominant eigenvectors are orthogonal".into()));
    }
    let lambda = num / dot;
    left.iter_mut().for_each(|l| *l /= dot);

    let gap = if n == 1 {
        1.0
    } else {
        let mut moduli: Vec<f64> = (v / scale)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        1.0 - moduli[1] / moduli[0]
    };

    Ok(PerronPair {
        lambda,
        left,
        right,
        gap,
    })
}

fn apply(m: &DMatrix<f64>, x: &[f64], transpose: bool) -> Vec<f64> {
    let n = m.nrows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if transpose { m[(j, i)] * x[j] } else { m[(i, j)] * x[j] })
                .sum()
        })
        .collect()
}

fn normalize_sum(x: &mut [f64]) {
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_two_state_chain() {
        let p = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let pi = stationary_vector(&p).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(stationary_vector(&p), Err(Error::NonErgodic(_))));
    }

    #[test]
    fn periodic_chain_is_rejected() {
        let p = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(stationary_vector(&p), Err(Error::NonErgodic(_))));
    }

    #[test]
    fn three_state_stationary_matches_hand_solution() {
        // Birth-death chain: detailed balance gives pi proportional to (1, 2, 4).
        let p = DMatrix::from_row_slice(
            3,
            3,
            &[0.6, 0.4, 0.0, 0.2, 0.4, 0.4, 0.0, 0.2, 0.8],
        );
        let pi = stationary_vector(&p).unwrap();
        for (got, want) in pi.iter().zip([1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn perron_pair_of_symmetric_two_by_two() {
        let e = 1f64.exp();
        let v = DMatrix::from_row_slice(2, 2, &[e, 1.0 / e, 1.0 / e, e]);
        let pp = perron_pair(&v).unwrap();
        assert!((pp.lambda - (e + 1.0 / e)).abs() < 1e-13);
        assert!((pp.right[0] - 0.5).abs() < 1e-15);
        let dot: f64 = pp.left.iter().zip(&pp.right).map(|(a, b)| a * b).sum();
        assert!((dot - 1.0).abs() < 1e-14);
        let expected_gap = 1.0 - (e - 1.0 / e) / (e + 1.0 / e);
        assert!((pp.gap - expected_gap).abs() < 1e-12);
    }

    #[test]
    fn perron_pair_of_non_symmetric_matrix() {
        let v = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 3.0, 1.0]);
        // Eigenvalues (3 +- sqrt(13)) / 2.
        let expected = (3.0 + 13f64.sqrt()) / 2.0;
        let pp = perron_pair(&v).unwrap();
        assert!((pp.lambda - expected).abs() < 1e-13);
        let vr = apply(&v, &pp.right, false);
        for (a, b) in vr.iter().zip(&pp.right) {
            assert!((a - expected * b).abs() < 1e-13);
        }
        let vl = apply(&v, &pp.left, true);
        for (a, b) in vl.iter().zip(&pp.left) {
            assert!((a - expected * b).abs() < 1e-12);
        }
    }
}
