use nalgebra::DMatrix;

use super::{shifted_matrix, SpinChainModel};
use crate::error::{Error, Result};
use crate::linalg::{perron_pair, PerronPair};
use crate::process::{Alphabet, WindowDistribution, DEFAULT_ENUMERATION_CAP};

fn binary() -> Alphabet {
    Alphabet::new(2).expect("two symbols")
}

fn check_len(len: usize) -> Result<()> {
    let entries = 1u128 << len.min(127);
    if len >= 127 || entries > DEFAULT_ENUMERATION_CAP as u128 {
        return Err(Error::SizeOverflow {
            entries,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// Law of `blocks` consecutive blocks of `block` spins each, given a
/// block-to-block matrix and its Perron pair:
/// `u_L[eta_1] u_R[eta_k] prod W(eta_i, eta_{i+1}) / lambda^(k-1)`.
fn block_chain(w: &DMatrix<f64>, pair: &PerronPair, blocks: usize) -> Vec<f64> {
    let n = w.nrows();
    let mut probs: Vec<f64> = pair.left.clone();
    let mut last: Vec<usize> = (0..n).collect();
    for _ in 1..blocks {
        let mut next = Vec::with_capacity(probs.len() * n);
        let mut next_last = Vec::with_capacity(probs.len() * n);
        for (p, &a) in probs.iter().zip(&last) {
            for c in 0..n {
                next.push(p * w[(a, c)] / pair.lambda);
                next_last.push(c);
            }
        }
        probs = next;
        last = next_last;
    }
    probs.iter().zip(&last).map(|(p, &a)| p * pair.right[a]).collect()
}

fn shrink(mut w: WindowDistribution, len: usize) -> WindowDistribution {
    while w.len() > len {
        w = w.marginalize_last();
    }
    w
}

/// Thermodynamic-limit law of `m` consecutive spins.
///
/// Sliding route: consecutive `R`-spin multi-indices overlap in `R - 1`
/// spins, so a window of `L = max(m, R)` spins is one multi-index
/// followed by `L - R` single-spin steps.
pub fn marginal(model: &SpinChainModel, m: usize) -> Result<WindowDistribution> {
    let r = model.range();
    let len = m.max(r);
    check_len(len)?;
    let (v, _) = shifted_matrix(model)?;
    let pair = perron_pair(&v)?;
    let n = 1usize << r;
    let mask = n / 2 - 1;
    // probs[word] with the last R spins of `word` as its low bits.
    let mut probs: Vec<f64> = pair.left.clone();
    for _ in r..len {
        let mut next = Vec::with_capacity(probs.len() * 2);
        for (word, p) in probs.iter().enumerate() {
            let a = word & (n - 1);
            for bit in 0..2 {
                let c = ((a & mask) << 1) | bit;
                next.push(p * v[(a, c)] / pair.lambda);
            }
        }
        probs = next;
    }
    let probs: Vec<f64> = probs
        .iter()
        .enumerate()
        .map(|(word, p)| p * pair.right[word & (n - 1)])
        .collect();
    let total: f64 = probs.iter().sum();
    let probs = probs.into_iter().map(|p| p / total).collect();
    Ok(shrink(WindowDistribution::new(binary(), len, probs)?, m))
}

/// Same law from the block matrix `W = V^R` over non-overlapping blocks:
/// the smallest `k R >= m + R` spins are built and the surplus summed out.
pub fn marginal_block_route(model: &SpinChainModel, m: usize) -> Result<WindowDistribution> {
    let r = model.range();
    let blocks = (m + r).div_ceil(r);
    let len = blocks * r;
    check_len(len)?;
    let (v, _) = shifted_matrix(model)?;
    let mut w = v.clone();
    for _ in 1..r {
        w = &w * &v;
    }
    let pair = perron_pair(&w)?;
    let probs = block_chain(&w, &pair, blocks);
    let total: f64 = probs.iter().sum();
    let probs = probs.into_iter().map(|p| p / total).collect();
    Ok(shrink(WindowDistribution::new(binary(), len, probs)?, m))
}
