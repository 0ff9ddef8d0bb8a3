//! JSON model definition files.
//!
//! ```json
//! {"kind": "builtin", "builtin": "toy-sub", "theta": [0.5]}
//! {"kind": "table", "alphabet_size": 2, "order": 1,
//!  "table": {"0": [0.9, 0.1], "1": [0.4, 0.6]}}
//! ```
//!
//! Table keys are history strings, one base-36 digit per symbol, oldest
//! first; order-0 tables use the empty key.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{Alphabet, Family, FiniteMarkovModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Table,
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_domain: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
}

impl ModelSpec {
    pub fn builtin(name: &str, theta: Vec<f64>) -> Self {
        Self {
            kind: ModelKind::Builtin,
            alphabet_size: None,
            order: None,
            theta: Some(theta),
            theta_domain: None,
            table: None,
            builtin: Some(name.to_string()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("model file: {e}")))
    }

    pub fn build(&self) -> Result<FiniteMarkovModel> {
        match self.kind {
            ModelKind::Builtin => self.build_builtin(),
            ModelKind::Table => self.build_table(),
        }
    }

    fn domain(&self) -> Option<Vec<(f64, f64)>> {
        self.theta_domain
            .as_ref()
            .map(|d| d.iter().map(|&[lo, hi]| (lo, hi)).collect())
    }

    fn build_builtin(&self) -> Result<FiniteMarkovModel> {
        let name = self
            .builtin
            .as_deref()
            .ok_or_else(|| Error::InvalidModel("builtin model needs a 'builtin' name".into()))?;
        let theta = self
            .theta
            .clone()
            .ok_or_else(|| Error::InvalidModel("builtin model needs 'theta'".into()))?;
        let model = match self.domain() {
            Some(domain) => {
                let family = Family::builtin(name)
                    .ok_or_else(|| Error::InvalidModel(format!("unknown builtin model '{name}'")))?;
                FiniteMarkovModel::from_family(family, theta, domain)?
            }
            None => FiniteMarkovModel::builtin(name, &theta)?,
        };
        if let Some(d) = self.alphabet_size {
            if d != model.alphabet().size() {
                return Err(Error::InvalidModel(format!(
                    "'{name}' has alphabet size {}, file says {d}",
                    model.alphabet().size()
                )));
            }
        }
        if let Some(m) = self.order {
            if m != model.order() {
                return Err(Error::InvalidModel(format!(
                    "'{name}' has order {}, file says {m}",
                    model.order()
                )));
            }
        }
        Ok(model)
    }

    fn build_table(&self) -> Result<FiniteMarkovModel> {
        let d = self
            .alphabet_size
            .ok_or_else(|| Error::InvalidModel("table model needs 'alphabet_size'".into()))?;
        let order = self
            .order
            .ok_or_else(|| Error::InvalidModel("table model needs 'order'".into()))?;
        let rows = self
            .table
            .as_ref()
            .ok_or_else(|| Error::InvalidModel("table model needs 'table'".into()))?;
        let alphabet = Alphabet::new(d)?;
        let states = alphabet
            .words(order)
            .ok_or_else(|| Error::InvalidModel("history space overflows".into()))?;
        let mut flat = vec![f64::NAN; states * d];
        let mut seen = vec![false; states];
        for (key, probs) in rows {
            let history = parse_history(key, d)?;
            if history.len() != order {
                return Err(Error::InvalidModel(format!(
                    "history '{key}' has length {}, order is {order}",
                    history.len()
                )));
            }
            if probs.len() != d {
                return Err(Error::InvalidModel(format!(
                    "history '{key}' lists {} probabilities, alphabet has {d}",
                    probs.len()
                )));
            }
            let h = alphabet.encode(&history);
            seen[h] = true;
            flat[h * d..(h + 1) * d].copy_from_slice(probs);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            let word: String = alphabet
                .decode(missing, order)
                .iter()
                .map(|&s| std::char::from_digit(s as u32, 36).unwrap_or('?'))
                .collect();
            return Err(Error::InvalidModel(format!("table misses history '{word}'")));
        }
        let theta = self.theta.clone().unwrap_or_else(|| vec![0.0]);
        let domain = self
            .domain()
            .unwrap_or_else(|| vec![(f64::NEG_INFINITY, f64::INFINITY); theta.len()]);
        Ok(FiniteMarkovModel::from_table(d, order, flat, theta, domain)?.with_id("table"))
    }
}

fn parse_history(key: &str, d: usize) -> Result<Vec<usize>> {
    key.chars()
        .map(|c| match c.to_digit(36) {
            Some(s) if (s as usize) < d => Ok(s as usize),
            _ => Err(Error::InvalidModel(format!(
                "history '{key}' has symbol '{c}' outside the alphabet"
            ))),
        })
        .collect()
}
