use serde::{Deserialize, Serialize};

use super::matrix::FisherMatrix;
use super::xi::{xi_ratio, Xi};
use crate::error::{Error, Result};
use crate::numdiff::{compensated_sum, try_central_vec};
use crate::process::{window_probs, window_with_analytic_gradient, FiniteMarkovModel, DEFAULT_ENUMERATION_CAP};

/// Probabilities below this contribute nothing to Fisher sums.
pub const NEGLIGIBLE_PROB: f64 = 1e-300;

/// How `d/d theta P(window)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum DerivativeScheme {
    /// Exact derivative of the transition table, propagated through the
    /// stationary law.
    Analytic,
    /// Central differences; `step: None` means `1e-5 * max(1, |theta_i|)`.
    CentralDifference { step: Option<f64>, richardson: bool },
}

impl Default for DerivativeScheme {
    fn default() -> Self {
        Self::central()
    }
}

impl DerivativeScheme {
    pub fn central() -> Self {
        Self::CentralDifference {
            step: None,
            richardson: false,
        }
    }

    pub fn central_with(step: f64, richardson: bool) -> Self {
        Self::CentralDifference {
            step: Some(step),
            richardson,
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Self::Analytic)
    }

    /// Tolerance the decomposition residual is held to.
    pub fn decomposition_tolerance(&self) -> f64 {
        if self.is_analytic() {
            1e-8
        } else {
            1e-5
        }
    }

    fn step_for(&self, theta: f64) -> Result<f64> {
        match *self {
            Self::Analytic => Ok(0.0),
            Self::CentralDifference { step: None, .. } => Ok(1e-5 * theta.abs().max(1.0)),
            Self::CentralDifference { step: Some(h), .. } => {
                if h > 0.0 && h.is_finite() {
                    Ok(h)
                } else {
                    Err(Error::InvalidArgument(format!("derivative step must be positive, got {h}")))
                }
            }
        }
    }
}

/// Window probabilities and their gradient, one vector per parameter.
pub(crate) struct WindowGradient {
    pub probs: Vec<f64>,
    pub grads: Vec<Vec<f64>>,
}

pub(crate) fn window_gradient(
    model: &FiniteMarkovModel,
    n: usize,
    scheme: DerivativeScheme,
) -> Result<WindowGradient> {
    if n == 0 {
        return Ok(WindowGradient {
            probs: vec![1.0],
            grads: vec![vec![0.0]; model.num_params()],
        });
    }
    match scheme {
        DerivativeScheme::Analytic => {
            let (probs, grads) = window_with_analytic_gradient(model, n, DEFAULT_ENUMERATION_CAP)?;
            Ok(WindowGradient { probs, grads })
        }
        DerivativeScheme::CentralDifference { richardson, .. } => {
            let probs = window_probs(model, &model.transition_table(), n, DEFAULT_ENUMERATION_CAP)?;
            let theta = model.theta().to_vec();
            let mut grads = Vec::with_capacity(theta.len());
            for (i, &t) in theta.iter().enumerate() {
                let h = scheme.step_for(t)?;
                let (lo, hi) = model.theta_domain()[i];
                if t - lo < 2.0 * h || hi - t < 2.0 * h {
                    return Err(Error::BoundaryTheta {
                        index: i,
                        value: t,
                        margin: 2.0 * h,
                    });
                }
                let eval = |x: f64| {
                    let mut th = theta.clone();
                    th[i] = x;
                    window_probs(model, &model.transition_table_at(&th), n, DEFAULT_ENUMERATION_CAP)
                };
                grads.push(try_central_vec(eval, t, h, richardson)?);
            }
            Ok(WindowGradient { probs, grads })
        }
    }
}

fn outer_sum(p: usize, terms: impl Fn(usize, usize) -> f64) -> FisherMatrix {
    let mut entries = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let v = terms(i, j);
            entries[i * p + j] = v;
            entries[j * p + i] = v;
        }
    }
    FisherMatrix::from_row_major(p, entries)
}

/// `sum_w P(w) s_i(w) s_j(w)` with scores `s = dP / P`.
pub(crate) fn fisher_from_gradient(w: &WindowGradient) -> FisherMatrix {
    outer_sum(w.grads.len(), |i, j| {
        compensated_sum(
            w.probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p >= NEGLIGIBLE_PROB)
                .map(|(k, &p)| w.grads[i][k] * w.grads[j][k] / p),
        )
    })
}

/// Conditional FI of the last symbol of `long` given the rest, where
/// `short` is the window one symbol shorter.
pub(crate) fn conditional_from_gradients(
    long: &WindowGradient,
    short: &WindowGradient,
    alphabet_size: usize,
) -> FisherMatrix {
    let score = |i: usize, k: usize| {
        let prefix = k / alphabet_size;
        long.grads[i][k] / long.probs[k] - short.grads[i][prefix] / short.probs[prefix]
    };
    outer_sum(long.grads.len(), |i, j| {
        compensated_sum(long.probs.iter().enumerate().filter_map(|(k, &p)| {
            let prefix = k / alphabet_size;
            (p >= NEGLIGIBLE_PROB && short.probs[prefix] >= NEGLIGIBLE_PROB)
                .then(|| p * score(i, k) * score(j, k))
        }))
    })
}

/// Fisher information of the first `n` symbols by exact enumeration.
pub fn joint_fisher(model: &FiniteMarkovModel, n: usize, scheme: DerivativeScheme) -> Result<FisherMatrix> {
    if n == 0 {
        return Ok(FisherMatrix::zeros(model.num_params()));
    }
    Ok(fisher_from_gradient(&window_gradient(model, n, scheme)?))
}

/// Conditional Fisher information `F_{k | 1:k-1}` from the conditional
/// scores, weighted by the length-`k` window. `k = 1` gives `F_1`.
pub fn conditional_fisher(model: &FiniteMarkovModel, k: usize, scheme: DerivativeScheme) -> Result<FisherMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("conditional Fisher needs k >= 1".into()));
    }
    let long = window_gradient(model, k, scheme)?;
    let short = window_gradient(model, k - 1, scheme)?;
    Ok(conditional_from_gradients(&long, &short, model.alphabet().size()))
}

/// Exact Fisher quantities of an `n`-symbol window and their Markov split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FisherReport {
    pub model_id: String,
    pub theta: Vec<f64>,
    pub order: usize,
    pub n: usize,
    pub scheme: DerivativeScheme,
    pub f1: FisherMatrix,
    /// `F_{1:k}` for `k = 1..=n`.
    pub joint_by_length: Vec<FisherMatrix>,
    /// `F_{k | 1:k-1}` for `k = 2..=n`.
    pub conditional_terms: Vec<FisherMatrix>,
    pub rate: FisherMatrix,
    pub excess: FisherMatrix,
    /// `F_{1:2} / (2 F_1)`, scalar models only.
    pub xi: Option<Xi>,
    /// Largest disagreement between the enumerated `F_{1:n}` and both
    /// the chain rule and `F_{1:M} + (n - M) f`.
    pub residual: f64,
    pub tolerance: f64,
}

impl FisherReport {
    pub fn joint(&self) -> &FisherMatrix {
        self.joint_by_length.last().expect("n >= 1")
    }

    pub fn joint_at(&self, k: usize) -> Option<&FisherMatrix> {
        k.checked_sub(1).and_then(|i| self.joint_by_length.get(i))
    }

    pub fn predicted(&self, k: usize) -> FisherMatrix {
        let base = match self.order {
            0 => FisherMatrix::zeros(self.rate.dim()),
            m => self.joint_by_length[m - 1].clone(),
        };
        base.add(&self.rate.scale(k.saturating_sub(self.order) as f64))
    }
}

/// Full Fisher report with the decomposition checked against the enumerated
/// joint FI. The residual is measured in units of `max(1, max|F_{1:n}|)`.
pub fn markov_decomposition(model: &FiniteMarkovModel, n: usize, scheme: DerivativeScheme) -> Result<FisherReport> {
    let order = model.order();
    if n < order + 1 {
        return Err(Error::InvalidArgument(format!(
            "window length {n} must be at least order + 1 = {}",
            order + 1
        )));
    }
    let longest = n.max(2);
    let windows: Vec<WindowGradient> = (0..=longest)
        .map(|k| window_gradient(model, k, scheme))
        .collect::<Result<_>>()?;
    let d = model.alphabet().size();

    let joint_by_length: Vec<FisherMatrix> = (1..=n).map(|k| fisher_from_gradient(&windows[k])).collect();
    let conditional_terms: Vec<FisherMatrix> = (2..=n)
        .map(|k| conditional_from_gradients(&windows[k], &windows[k - 1], d))
        .collect();
    let f1 = joint_by_length[0].clone();
    let rate = if order == 0 {
        f1.clone()
    } else {
        conditional_terms[order - 1].clone()
    };
    let joint_m = match order {
        0 => FisherMatrix::zeros(model.num_params()),
        m => joint_by_length[m - 1].clone(),
    };
    let excess = joint_m.sub(&rate.scale(order as f64));

    let joint_n = &joint_by_length[n - 1];
    let chain = conditional_terms.iter().fold(f1.clone(), |acc, c| acc.add(c));
    let markov = joint_m.add(&rate.scale((n - order) as f64));
    let mut residual = joint_n.max_abs_diff(&chain).max(joint_n.max_abs_diff(&markov));
    for c in conditional_terms.iter().skip(order) {
        residual = residual.max(c.max_abs_diff(&rate));
    }
    let scale = joint_n.max_abs().max(1.0);
    residual /= scale;
    let tolerance = scheme.decomposition_tolerance();

    let xi = if model.num_params() == 1 {
        let f12 = if n >= 2 {
            joint_by_length[1].entries()[0]
        } else {
            fisher_from_gradient(&windows[2]).entries()[0]
        };
        xi_ratio(f12, f1.entries()[0]).ok()
    } else {
        None
    };

    if !(residual <= tolerance) {
        return Err(Error::DecompositionMismatch { residual, tolerance });
    }
    Ok(FisherReport {
        model_id: model.id().to_string(),
        theta: model.theta().to_vec(),
        order,
        n,
        scheme,
        f1,
        joint_by_length,
        conditional_terms,
        rate,
        excess,
        xi,
        residual,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(t: f64) -> FiniteMarkovModel {
        FiniteMarkovModel::builtin("iid-bernoulli", &[t]).unwrap()
    }

    #[test]
    fn bernoulli_single_symbol() {
        // Two-term sum: theta (1/theta)^2 + (1-theta) (1/(1-theta))^2.
        let t: f64 = 0.3;
        let direct = t * (1.0 / t).powi(2) + (1.0 - t) * (1.0 / (1.0 - t)).powi(2);
        for scheme in [DerivativeScheme::Analytic, DerivativeScheme::central()] {
            let f = joint_fisher(&bern(t), 1, scheme).unwrap().value().unwrap();
            assert!((f - direct).abs() < 1e-8, "{f}");
        }
        assert!((direct - 4.7619).abs() < 1e-4);
    }

    #[test]
    fn bernoulli_is_additive() {
        let t = 0.3;
        let f5 = joint_fisher(&bern(t), 5, DerivativeScheme::Analytic).unwrap().value().unwrap();
        assert!((f5 / (5.0 / (t * (1.0 - t))) - 1.0).abs() < 1e-12);
        let c = conditional_fisher(&bern(t), 4, DerivativeScheme::Analytic).unwrap().value().unwrap();
        assert!((c - 1.0 / (t * (1.0 - t))).abs() < 1e-10);
    }

    #[test]
    fn parameter_free_table_has_zero_information() {
        let m = FiniteMarkovModel::from_table(2, 1, vec![0.8, 0.2, 0.3, 0.7], vec![0.0], vec![(-1.0, 1.0)]).unwrap();
        for scheme in [DerivativeScheme::Analytic, DerivativeScheme::central()] {
            assert_eq!(joint_fisher(&m, 4, scheme).unwrap().max_abs(), 0.0);
        }
    }

    // Hand-derived toy-sub values at theta = 0.5 (pair law from the 2x2
    // stationary solution, scores by symbolic differentiation):
    // F_1 = 0.039967..., f = F_{2|1} = 3.
    #[test]
    fn toy_sub_rate_and_excess() {
        let m = FiniteMarkovModel::builtin("toy-sub", &[0.5]).unwrap();
        let r = markov_decomposition(&m, 8, DerivativeScheme::Analytic).unwrap();
        let s = 0.5f64.sqrt();
        let pi0 = 1.0 / (2.0 + s);
        let pi1 = 1.0 - pi0;
        // d pi0 / d theta with pi0 = 1 / (2 + sqrt(theta)).
        let dpi0 = -(0.5 / s) * pi0 * pi0;
        let f1 = dpi0 * dpi0 / pi0 + dpi0 * dpi0 / pi1;
        // Conditional scores: prev 0 -> (1/theta, -1/(1-theta)); prev 1 ->
        // (-(1/(2 s))/(1-s), (1/(2 s))/s).
        let ds = 0.5 / s;
        let f = pi0 * (0.5 * 4.0 + 0.5 * 4.0) + pi1 * ((1.0 - s) * (ds / (1.0 - s)).powi(2) + s * (ds / s).powi(2));
        assert!((r.f1.value().unwrap() - f1).abs() < 1e-12);
        assert!((r.rate.value().unwrap() - f).abs() < 1e-12);
        assert!((f - 3.0).abs() < 1e-12);
        assert!((r.excess.value().unwrap() - (f1 - f)).abs() < 1e-12);
        assert!(r.excess.value().unwrap() < 0.0);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn toy_super_has_positive_excess() {
        let m = FiniteMarkovModel::builtin("toy-super", &[0.7]).unwrap();
        let r = markov_decomposition(&m, 6, DerivativeScheme::Analytic).unwrap();
        assert!(r.excess.value().unwrap() > 0.0);
        assert!(r.rate.value().unwrap() < r.f1.value().unwrap());
    }

    #[test]
    fn order_one_identities() {
        let m = FiniteMarkovModel::builtin("toy-super", &[0.4]).unwrap();
        let r = markov_decomposition(&m, 3, DerivativeScheme::Analytic).unwrap();
        let f1 = r.f1.value().unwrap();
        let f12 = r.joint_at(2).unwrap().value().unwrap();
        assert!((r.rate.value().unwrap() - (f12 - f1)).abs() < 1e-12);
        assert!((r.excess.value().unwrap() - (2.0 * f1 - f12)).abs() < 1e-12);
        assert_eq!(r.xi.unwrap(), Xi::Finite(f12 / (2.0 * f1)));
    }

    #[test]
    fn iid_rate_equals_marginal() {
        let r = markov_decomposition(&bern(0.2), 4, DerivativeScheme::Analytic).unwrap();
        assert_eq!(r.rate, r.f1);
        assert!(r.excess.max_abs() < 1e-12);
    }

    #[test]
    fn analytic_and_central_agree() {
        for (name, theta) in [
            ("iid-bernoulli", vec![0.35]),
            ("toy-sub", vec![0.5]),
            ("toy-super", vec![0.7]),
            ("two-param", vec![0.3, 0.6]),
            ("order-two", vec![0.45]),
        ] {
            let m = FiniteMarkovModel::builtin(name, &theta).unwrap();
            let a = joint_fisher(&m, 5, DerivativeScheme::Analytic).unwrap();
            let c = joint_fisher(&m, 5, DerivativeScheme::central_with(1e-4, true)).unwrap();
            assert!(a.max_abs_diff(&c) <= 1e-6 * a.max_abs(), "{name}: {a:?} vs {c:?}");
        }
    }

    #[test]
    fn boundary_theta_is_rejected() {
        let m = bern(1e-6);
        let err = joint_fisher(&m, 2, DerivativeScheme::central()).unwrap_err();
        assert!(matches!(err, Error::BoundaryTheta { index: 0, .. }));
        assert!(err.is_validation());
    }

    #[test]
    fn window_shorter_than_order_plus_one_is_rejected() {
        let m = FiniteMarkovModel::builtin("order-two", &[0.5]).unwrap();
        assert!(markov_decomposition(&m, 2, DerivativeScheme::Analytic).is_err());
        assert!(markov_decomposition(&m, 3, DerivativeScheme::Analytic).is_ok());
    }

    #[test]
    fn multi_parameter_matrix_is_symmetric_psd() {
        let m = FiniteMarkovModel::builtin("two-param", &[0.25, 0.7]).unwrap();
        let r = markov_decomposition(&m, 5, DerivativeScheme::Analytic).unwrap();
        assert_eq!(r.rate.dim(), 2);
        assert!(r.xi.is_none());
        for f in &r.joint_by_length {
            assert!(f.asymmetry() < 1e-10);
            assert!(f.min_eigenvalue() >= -1e-9);
        }
    }

    #[test]
    fn report_roundtrips_through_json() {
        let m = FiniteMarkovModel::builtin("toy-sub", &[0.5]).unwrap();
        let r = markov_decomposition(&m, 3, DerivativeScheme::central()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: FisherReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.rate, r.rate);
        assert!(s.contains(r#""scheme":{"mode":"central-difference","step":null,"richardson":false}"#));
    }
}
