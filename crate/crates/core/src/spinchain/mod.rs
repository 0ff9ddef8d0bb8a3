//! Classical Ising chains with couplings of finite range, solved in the
//! thermodynamic limit by transfer matrices.
//!
//! Spins are encoded as symbols with `0 = up (+1)` and `1 = down (-1)`.
//! A block of `R` spins `s_1..s_R` has multi-index `sum_i bit(s_i) 2^(R-i)`,
//! so for `R = 2` the index is `2 bit(s_1) + bit(s_2)`.

mod marginal;
mod order;
mod scan;
mod thermometry;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{perron_pair, PerronPair};

pub use marginal::{marginal, marginal_block_route};
pub use order::{verify_chain_markov_order, ChainOrderCheck};
pub use scan::{ising_grid, nnn_panel, scan_maps, ScanPoint, ScanRow, XI_DIVERGED};
pub use thermometry::{
    specific_heat, thermal_fisher, thermal_scheme, thermometry_report, zero_derivative_curve, SpecificHeat,
    ThermometryReport, ZeroDerivativeScan,
};

/// Largest `|coupling| / T` or `|B| / T` accepted.
pub const MAX_EXPONENT: f64 = 700.0;

/// `H = -B sum_j s_j - sum_k J_k sum_j s_j s_{j+k}` at temperature `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinChainModel {
    b: f64,
    couplings: Vec<f64>,
    t: f64,
}

impl SpinChainModel {
    /// Trailing zero couplings are trimmed; an all-zero list keeps one
    /// zero coupling so the chain still has range 1.
    pub fn new(b: f64, couplings: &[f64], t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("temperature must be positive, got {t}")));
        }
        if !b.is_finite() || couplings.iter().any(|j| !j.is_finite()) {
            return Err(Error::InvalidArgument("field and couplings must be finite".into()));
        }
        let mut couplings = couplings.to_vec();
        while couplings.last() == Some(&0.0) {
            couplings.pop();
        }
        if couplings.is_empty() {
            couplings.push(0.0);
        }
        Ok(Self { b, couplings, t })
    }

    /// Nearest-neighbour chain.
    pub fn nearest(b: f64, j: f64, t: f64) -> Result<Self> {
        Self::new(b, &[j], t)
    }

    /// Next-to-nearest-neighbour chain with `J_2 = alpha J`.
    pub fn nnn(b: f64, j: f64, alpha: f64, t: f64) -> Result<Self> {
        Self::new(b, &[j, alpha * j], t)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn range(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_free(&self) -> bool {
        self.couplings.iter().all(|&j| j == 0.0)
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.b, &self.couplings, t)
    }

    fn check_overflow(&self) -> Result<()> {
        let worst = self
            .couplings
            .iter()
            .chain(std::iter::once(&self.b))
            .map(|x| x.abs() / self.t)
            .fold(0.0, f64::max);
        if worst > MAX_EXPONENT {
            return Err(Error::OverflowRisk { ratio: worst });
        }
        Ok(())
    }

    /// Energy `-(B s_last + sum_k J_k s_{last-k} s_last)` released when the
    /// last spin of an `R + 1` spin word is appended; `word` holds symbols.
    pub(crate) fn step_energy(&self, word: &[usize]) -> f64 {
        let spin = |x: usize| if x == 0 { 1.0 } else { -1.0 };
        let last = word.len() - 1;
        let s = spin(word[last]);
        let mut e = self.b * s;
        for (k, j) in self.couplings.iter().enumerate() {
            e += j * spin(word[last - k - 1]) * s;
        }
        -e
    }

    /// Upper bound of `-step_energy`, used as the weight shift.
    fn max_step_gain(&self) -> f64 {
        self.b.abs() + self.couplings.iter().map(|j| j.abs()).sum::<f64>()
    }
}

/// Transfer matrix with weights shifted by `exp(-max_gain / T)` so every
/// entry is at most one; `log_shift` restores the true scale of `lambda`.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub range: usize,
    pub matrix: DMatrix<f64>,
    pub log_shift: f64,
    pub perron: PerronPair,
}

impl TransferMatrix {
    /// `ln` of the unshifted dominant eigenvalue.
    pub fn ln_lambda(&self) -> f64 {
        self.perron.lambda.ln() + self.log_shift
    }

    pub fn lambda(&self) -> f64 {
        self.ln_lambda().exp()
    }
}

fn spin_of_bit(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Shifted transfer matrix and the per-step log shift.
///
/// For `R = 1` this is the symmetric matrix with entries
/// `exp[(J s s' + B (s + s') / 2) / T]`. For `R >= 2` it is the sliding
/// matrix: `(eta, eta')` is nonzero only when the last `R - 1` spins of
/// `eta` are the first `R - 1` of `eta'`, and then carries the weight of
/// the new spin's field and of every coupling it closes.
pub(crate) fn shifted_matrix(model: &SpinChainModel) -> Result<(DMatrix<f64>, f64)> {
    model.check_overflow()?;
    let t = model.t;
    let shift = model.max_step_gain() / t;
    let r = model.range();
    if r == 1 {
        let j = model.couplings[0];
        let m = DMatrix::from_fn(2, 2, |a, c| {
            let (s, s2) = (spin_of_bit(a), spin_of_bit(c));
            ((j * s * s2 + 0.5 * model.b * (s + s2)) / t - shift).exp()
        });
        return Ok((m, shift));
    }
    let n = 1usize << r;
    let mask = n / 2 - 1;
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        for bit in 0..2 {
            let c = ((a & mask) << 1) | bit;
            let mut word: Vec<usize> = (0..r).map(|i| (a >> (r - 1 - i)) & 1).collect();
            word.push(bit);
            m[(a, c)] = (-model.step_energy(&word) / t - shift).exp();
        }
    }
    Ok((m, shift))
}

pub fn build_transfer_matrix(model: &SpinChainModel) -> Result<TransferMatrix> {
    let (matrix, log_shift) = shifted_matrix(model)?;
    let perron = perron_pair(&matrix)?;
    Ok(TransferMatrix {
        range: model.range(),
        matrix,
        log_shift,
        perron,
    })
}
