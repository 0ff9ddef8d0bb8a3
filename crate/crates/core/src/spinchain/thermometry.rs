use serde::{Deserialize, Serialize};

use super::marginal::marginal;
use super::SpinChainModel;
use crate::error::{Error, Result};
use crate::fisher::{conditional_from_gradients, fisher_from_gradient, xi_ratio, DerivativeScheme, WindowGradient, Xi};
use crate::numdiff::{central, compensated_sum, try_central_vec};
use crate::process::Alphabet;

/// Central differences in `T` with step `1e-4 T` and Richardson extrapolation.
pub fn thermal_scheme() -> DerivativeScheme {
    DerivativeScheme::CentralDifference {
        step: None,
        richardson: true,
    }
}

fn step_for(scheme: DerivativeScheme, t: f64) -> Result<(f64, bool)> {
    let (h, richardson) = match scheme {
        DerivativeScheme::Analytic => {
            return Err(Error::InvalidArgument(
                "spin-chain temperature derivatives use central differences".into(),
            ))
        }
        DerivativeScheme::CentralDifference { step, richardson } => (step.unwrap_or(1e-4 * t), richardson),
    };
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("derivative step must be positive, got {h}")));
    }
    if t <= 2.0 * h {
        return Err(Error::BoundaryTheta {
            index: 0,
            value: t,
            margin: 2.0 * h,
        });
    }
    Ok((h, richardson))
}

/// `m`-spin marginal and its temperature derivative.
fn window_derivative(model: &SpinChainModel, m: usize, scheme: DerivativeScheme) -> Result<WindowGradient> {
    let t = model.t();
    let (h, richardson) = step_for(scheme, t)?;
    let probs = marginal(model, m)?.probs().to_vec();
    let d = try_central_vec(|x| Ok::<_, Error>(marginal(&model.with_t(x)?, m)?.probs().to_vec()), t, h, richardson)?;
    Ok(WindowGradient {
        probs,
        grads: vec![d],
    })
}

fn drop_last(w: &WindowGradient) -> WindowGradient {
    let fold = |v: &[f64]| v.chunks(2).map(|c| c[0] + c[1]).collect::<Vec<f64>>();
    WindowGradient {
        probs: fold(&w.probs),
        grads: w.grads.iter().map(|g| fold(g)).collect(),
    }
}

/// Fisher information about `T` carried by `m` consecutive spins.
pub fn thermal_fisher(model: &SpinChainModel, m: usize, scheme: DerivativeScheme) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let w = window_derivative(model, m, scheme)?;
    Ok(if m == 1 { single_spin_fisher(model, &w) } else { fisher_from_gradient(&w).entries()[0] })
}

/// Without a field `P(up) = 1/2` at every temperature. The differenced
/// value only carries rounding, so it is replaced by the exact zero.
fn single_spin_fisher(model: &SpinChainModel, w: &WindowGradient) -> f64 {
    if model.b() == 0.0 {
        0.0
    } else {
        fisher_from_gradient(w).entries()[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecificHeat {
    pub c: f64,
    pub c_over_t2: f64,
}

/// Windows of lengths `0..=R+1` with their derivatives, longest computed once.
fn windows(model: &SpinChainModel, scheme: DerivativeScheme) -> Result<Vec<WindowGradient>> {
    let len = model.range() + 1;
    let mut out = vec![window_derivative(model, len, scheme)?];
    for _ in 0..len {
        let shorter = drop_last(out.last().expect("non-empty"));
        out.push(shorter);
    }
    out.reverse();
    Ok(out)
}

/// Energy per site assigned to an `R + 1` spin window: the field term and
/// each coupling averaged over every spin and pair the window holds. By
/// translation invariance its mean is the energy per site, and symmetric
/// averaging gives degenerate ground states the same window energy.
fn window_energy(model: &SpinChainModel, word: &[usize]) -> f64 {
    let s: Vec<f64> = word.iter().map(|&x| if x == 0 { 1.0 } else { -1.0 }).collect();
    let n = s.len();
    let field = model.b() * s.iter().sum::<f64>() / n as f64;
    let bonds: f64 = model
        .couplings()
        .iter()
        .enumerate()
        .map(|(k, j)| {
            let d = k + 1;
            j * (0..n - d).map(|i| s[i] * s[i + d]).sum::<f64>() / (n - d) as f64
        })
        .sum();
    -(field + bonds)
}

/// Per-site heat capacity `c = du/dT`.
///
/// `u = sum_w P(w) e(w)` over `R + 1` spin windows. Measuring `e` from its
/// minimum makes every term non-negative, so `c = sum_w (dP/dT) (e - e_min)`
/// keeps its relative precision when `c` is exponentially small.
fn heat_from_window(model: &SpinChainModel, w: &WindowGradient) -> f64 {
    let len = model.range() + 1;
    let alphabet = Alphabet::new(2).expect("two symbols");
    let energies: Vec<f64> = (0..w.probs.len()).map(|code| window_energy(model, &alphabet.decode(code, len))).collect();
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    compensated_sum(w.grads[0].iter().zip(&energies).map(|(dp, e)| dp * (e - e_min)))
}

pub fn specific_heat(model: &SpinChainModel, scheme: DerivativeScheme) -> Result<SpecificHeat> {
    let len = model.range() + 1;
    let w = window_derivative(model, len, scheme)?;
    let c = heat_from_window(model, &w);
    Ok(SpecificHeat {
        c,
        c_over_t2: c / (model.t() * model.t()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermometryReport {
    pub t: f64,
    pub b: f64,
    pub couplings: Vec<f64>,
    pub f1: f64,
    pub f12: f64,
    /// Conditional information of one spin given the previous `R`.
    pub f: f64,
    /// `None` when both `F_1` and `F_{1:2}` vanish.
    pub xi: Option<Xi>,
    pub delta_f: f64,
    pub c: f64,
    pub c_over_t2: f64,
}

/// One- and two-spin thermal information, rate, additivity ratio and heat
/// capacity at the model's temperature.
pub fn thermometry_report(model: &SpinChainModel, scheme: DerivativeScheme) -> Result<ThermometryReport> {
    let r = model.range();
    let w = windows(model, scheme)?;
    let f1 = single_spin_fisher(model, &w[1]);
    let f12 = fisher_from_gradient(&w[2]).entries()[0];
    let f = conditional_from_gradients(&w[r + 1], &w[r], 2).entries()[0];
    let c = heat_from_window(model, &w[r + 1]);
    let t = model.t();
    Ok(ThermometryReport {
        t,
        b: model.b(),
        couplings: model.couplings().to_vec(),
        f1,
        f12,
        f,
        xi: xi_ratio(f12, f1).ok(),
        delta_f: f12 - 2.0 * f1,
        c,
        c_over_t2: c / (t * t),
    })
}

/// Roots of `dP(up)/dT` along an antiferromagnetic (or any) coupling `j`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroDerivativeScan {
    /// `(B/J, T*)` pairs.
    pub roots: Vec<(f64, f64)>,
    /// Ratios where `P(up)` is constant in `T` (zero field).
    pub degenerate: Vec<f64>,
}

const SCAN_POINTS: usize = 256;
/// Below `SLOPE_NOISE / T` the sign of `dP/dT` is rounding noise: `P` carries
/// absolute errors near machine epsilon and the step is `1e-4 T`.
const SLOPE_NOISE: f64 = 1e-9;

fn up_slope(b: f64, j: f64, t: f64) -> Result<f64> {
    let p_up = |x: f64| {
        SpinChainModel::nearest(b, j, x)
            .and_then(|m| marginal(&m, 1))
            .map_or(f64::NAN, |w| w.probs()[0])
    };
    let d = central(p_up, t, 1e-4 * t, true);
    if d.is_nan() {
        // Surface the underlying error.
        marginal(&SpinChainModel::nearest(b, j, t)?, 1)?;
    }
    Ok(d)
}

/// Temperatures in `[t_lo, t_hi]` where `P(up)` is stationary in `T`, for
/// each `B/J` in the grid at coupling `j`. A log-spaced pre-scan finds sign
/// changes, bisection refines each to `|dT| <= 1e-6`.
pub fn zero_derivative_curve(b_over_j: &[f64], j: f64, t_lo: f64, t_hi: f64) -> Result<ZeroDerivativeScan> {
    if !(t_lo > 0.0 && t_lo < t_hi) {
        return Err(Error::InvalidArgument(format!("bad temperature bracket [{t_lo}, {t_hi}]")));
    }
    let mut scan = ZeroDerivativeScan::default();
    let ratio = (t_hi / t_lo).ln();
    let temps: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| t_lo * (ratio * i as f64 / (SCAN_POINTS - 1) as f64).exp())
        .collect();
    for &r in b_over_j {
        let b = r * j;
        if b == 0.0 {
            scan.degenerate.push(r);
            continue;
        }
        let slopes: Vec<f64> = temps.iter().map(|&t| up_slope(b, j, t)).collect::<Result<_>>()?;
        for i in 0..SCAN_POINTS - 1 {
            let (ga, gb) = (slopes[i], slopes[i + 1]);
            if ga * gb >= 0.0 || ga.abs().max(gb.abs()) < SLOPE_NOISE / temps[i] {
                continue;
            }
            let (mut lo, mut hi, mut glo) = (temps[i], temps[i + 1], ga);
            while hi - lo > 1e-6 {
                let mid = 0.5 * (lo + hi);
                let gm = up_slope(b, j, mid)?;
                if gm * glo > 0.0 {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            scan.roots.push((r, 0.5 * (lo + hi)));
        }
    }
    Ok(scan)
}
