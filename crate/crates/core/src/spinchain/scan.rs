use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::thermometry::thermometry_report;
use super::SpinChainModel;
use crate::error::{Error, Result};
use crate::fisher::{DerivativeScheme, Xi};

/// `xi` above this is reported as diverged.
pub const XI_DIVERGED: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub t: f64,
    pub b: f64,
    pub couplings: Vec<f64>,
}

/// One grid point of a thermometry map. `xi` is infinite when `F_1 = 0`
/// and NaN when `F_1 = F_{1:2} = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub alpha: f64,
    #[serde(rename = "F1")]
    pub f1: f64,
    #[serde(rename = "F12")]
    pub f12: f64,
    pub f: f64,
    pub xi: f64,
    #[serde(rename = "delta_F")]
    pub delta_f: f64,
    pub c: f64,
    #[serde(rename = "c_over_T2")]
    pub c_over_t2: f64,
    /// Semicolon separated: `xi_diverged`, `overflow_skipped`.
    pub flags: String,
}

fn row(point: &ScanPoint, scheme: DerivativeScheme) -> Result<ScanRow> {
    let j = point.couplings.first().copied().unwrap_or(0.0);
    let alpha = match point.couplings.get(1) {
        Some(j2) if j != 0.0 => j2 / j,
        _ => 0.0,
    };
    let mut out = ScanRow {
        t: point.t,
        b: point.b,
        j,
        alpha,
        f1: f64::NAN,
        f12: f64::NAN,
        f: f64::NAN,
        xi: f64::NAN,
        delta_f: f64::NAN,
        c: f64::NAN,
        c_over_t2: f64::NAN,
        flags: String::new(),
    };
    let model = SpinChainModel::new(point.b, &point.couplings, point.t)?;
    let report = match model.check_overflow().and_then(|_| thermometry_report(&model, scheme)) {
        Ok(r) => r,
        Err(Error::OverflowRisk { .. }) => {
            out.flags = "overflow_skipped".into();
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    out.f1 = report.f1;
    out.f12 = report.f12;
    out.f = report.f;
    out.delta_f = report.delta_f;
    out.c = report.c;
    out.c_over_t2 = report.c_over_t2;
    out.xi = match report.xi {
        Some(Xi::Finite(x)) => x,
        Some(Xi::Diverged) => f64::INFINITY,
        None => f64::NAN,
    };
    if out.xi > XI_DIVERGED {
        out.flags = "xi_diverged".into();
    }
    Ok(out)
}

/// Thermometry at every point, in input order.
pub fn scan_maps(points: &[ScanPoint], scheme: DerivativeScheme) -> Result<Vec<ScanRow>> {
    points.par_iter().map(|p| row(p, scheme)).collect()
}

/// Nearest-neighbour grid over `B/J` (outer) and `T` (inner) at fixed `J`.
pub fn ising_grid(j: f64, b_over_j: &[f64], temps: &[f64]) -> Vec<ScanPoint> {
    b_over_j
        .iter()
        .flat_map(|&r| {
            temps.iter().map(move |&t| ScanPoint {
                t,
                b: r * j,
                couplings: vec![j],
            })
        })
        .collect()
}

/// Next-nearest-neighbour panel at fixed `B` and `J/B`, over `alpha = J2/J`
/// (outer) and `T` (inner).
pub fn nnn_panel(b: f64, j_over_b: f64, alphas: &[f64], temps: &[f64]) -> Vec<ScanPoint> {
    let j = j_over_b * b;
    alphas
        .iter()
        .flat_map(|&a| {
            temps.iter().map(move |&t| ScanPoint {
                t,
                b,
                couplings: vec![j, a * j],
            })
        })
        .collect()
}
