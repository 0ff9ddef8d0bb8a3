use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::Alphabet;
use crate::sampling::Trajectory;

/// Sliding-window counts of every length-`order + 1` word, plus the first
/// `order` symbols that no full window conditions on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficientStats {
    alphabet: Alphabet,
    order: usize,
    /// Indexed by word code, oldest symbol most significant.
    counts: Vec<u64>,
    boundary: Vec<usize>,
}

impl SufficientStats {
    pub fn from_symbols(symbols: &[usize], alphabet: Alphabet, order: usize) -> Result<Self> {
        if symbols.len() < order + 1 {
            return Err(Error::TooShort {
                len: symbols.len(),
                order,
            });
        }
        let d = alphabet.size();
        let words = alphabet
            .words(order + 1)
            .ok_or_else(|| Error::InvalidArgument("window space overflows".into()))?;
        if let Some(&bad) = symbols.iter().find(|&&s| s >= d) {
            return Err(Error::InvalidArgument(format!("symbol {bad} outside alphabet of size {d}")));
        }
        let mut counts = vec![0u64; words];
        let mut code = alphabet.encode(&symbols[..order]);
        for &s in &symbols[order..] {
            code = (code * d + s) % words;
            counts[code] += 1;
        }
        Ok(Self {
            alphabet,
            order,
            counts,
            boundary: symbols[..order].to_vec(),
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, word: &[usize]) -> u64 {
        self.counts[self.alphabet.encode(word)]
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.total() as usize + self.order
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Sliding-window statistics of a symbolic trajectory.
pub fn sliding_window_stats(traj: &Trajectory, alphabet: Alphabet, order: usize) -> Result<SufficientStats> {
    let symbols = traj
        .symbols()
        .ok_or_else(|| Error::InvalidArgument("sliding-window statistics need a symbolic trajectory".into()))?;
    SufficientStats::from_symbols(symbols, alphabet, order)
}

/// Occurrences of each symbol.
pub fn symbol_counts(symbols: &[usize], alphabet: Alphabet) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; alphabet.size()];
    for &s in symbols {
        *counts
            .get_mut(s)
            .ok_or_else(|| Error::InvalidArgument(format!("symbol {s} outside alphabet")))? += 1;
    }
    Ok(counts)
}
