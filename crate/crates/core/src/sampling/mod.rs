//! Seeded trajectories of finite Markov models and of the Gaussian
//! Markov chain.
//!
//! Every generator is a ChaCha8 stream seeded with `seed_from_u64`, so a
//! trajectory is a pure function of model, parameters, length and seed.
//! Replica `i` of an experiment with base seed `s` uses seed `s + i`.

mod finite;
mod gaussian;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub use finite::sample_finite;
pub use gaussian::{
    conditional_mean_coefficients, geometric_gaussian_conditional_check, sample_gaussian,
    tridiagonal_gaussian_conditional_check, GaussianMarkovModel,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every random draw in the crate.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of replica `index` under base seed `base`.
pub fn replica_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Values {
    Symbols(Vec<usize>),
    Reals(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Symbols(v) => v.len(),
            Values::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub values: Values,
    pub seed: u64,
    pub model_id: String,
    pub theta: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn symbols(&self) -> Option<&[usize]> {
        match &self.values {
            Values::Symbols(v) => Some(v),
            Values::Reals(_) => None,
        }
    }

    pub fn reals(&self) -> Option<&[f64]> {
        match &self.values {
            Values::Reals(v) => Some(v),
            Values::Symbols(_) => None,
        }
    }

    /// `# model=<id> theta=<a,b,..> seed=<u64>`, then one value per line.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        let theta: Vec<String> = self.theta.iter().map(|t| t.to_string()).collect();
        writeln!(out, "# model={} theta={} seed={}", self.model_id, theta.join(","), self.seed)?;
        match &self.values {
            Values::Symbols(v) => v.iter().try_for_each(|s| writeln!(out, "{s}")),
            Values::Reals(v) => v.iter().try_for_each(|x| writeln!(out, "{x}")),
        }
    }
}
