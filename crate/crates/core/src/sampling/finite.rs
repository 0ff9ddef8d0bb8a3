use rand::distributions::{Distribution, WeightedIndex};

use super::{rng_from_seed, Trajectory, Values};
use crate::error::{Error, Result};
use crate::process::{stationary_distribution, FiniteMarkovModel};

/// Stationary trajectory: the first `order` symbols come from the
/// stationary history law, each later one from the conditional table.
pub fn sample_finite(model: &FiniteMarkovModel, length: usize, seed: u64) -> Result<Trajectory> {
    if length == 0 {
        return Err(Error::InvalidArgument("trajectory length must be at least 1".into()));
    }
    let alphabet = model.alphabet();
    let d = alphabet.size();
    let order = model.order();
    let pi = stationary_distribution(model)?;
    let table = model.transition_table();
    let weighted = |w: &[f64]| {
        WeightedIndex::new(w).map_err(|e| Error::InvalidModel(format!("bad sampling weights: {e}")))
    };
    let start = weighted(pi.probs())?;
    let rows: Vec<WeightedIndex<f64>> = table.chunks(d).map(weighted).collect::<Result<_>>()?;

    let mut rng = rng_from_seed(seed);
    let mut values = alphabet.decode(start.sample(&mut rng), order);
    values.truncate(length);
    // Rolling code of the last `order` symbols.
    let states = alphabet.words(order).unwrap_or(1);
    let mut h = alphabet.encode(&values) % states;
    while values.len() < length {
        let x = rows[h].sample(&mut rng);
        values.push(x);
        h = (h * d + x) % states;
    }
    Ok(Trajectory {
        values: Values::Symbols(values),
        seed,
        model_id: model.id().to_string(),
        theta: model.theta().to_vec(),
    })
}
