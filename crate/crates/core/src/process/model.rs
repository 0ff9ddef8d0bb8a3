use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite set of symbols `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidModel(format!(
                "alphabet size must be at least 2, got {size}"
            )));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of words of length `n`, or `None` on overflow.
    pub fn words(&self, n: usize) -> Option<usize> {
        self.size.checked_pow(u32::try_from(n).ok()?)
    }

    /// Base-`d` code of a word, oldest symbol most significant.
    pub fn encode(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |acc, &s| acc * self.size + s)
    }

    pub fn decode(&self, mut code: usize, len: usize) -> Vec<usize> {
        let mut word = vec![0; len];
        for slot in word.iter_mut().rev() {
            *slot = code % self.size;
            code /= self.size;
        }
        word
    }
}

/// Parameterized law of the next symbol given the last `order` symbols.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `P(1) = theta`, independent draws.
    IidBernoulli,
    /// Columns `(theta, 1 - theta)` and `(1 - sqrt(theta), sqrt(theta))`.
    ToySub,
    /// Columns `(theta, 1 - theta)` and `(1 - exp(-theta/3), exp(-theta/3))`.
    ToySuper,
    /// Two-state chain with `P(0|0) = theta_1`, `P(0|1) = theta_2`.
    TwoParam,
    /// Binary chain whose next symbol depends on the last two.
    OrderTwo,
    /// Fixed transition table that does not depend on theta.
    Table(Vec<f64>),
}

impl Family {
    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            "iid-bernoulli" => Family::IidBernoulli,
            "toy-sub" => Family::ToySub,
            "toy-super" => Family::ToySuper,
            "two-param" => Family::TwoParam,
            "order-two" => Family::OrderTwo,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::IidBernoulli => "iid-bernoulli",
            Family::ToySub => "toy-sub",
            Family::ToySuper => "toy-super",
            Family::TwoParam => "two-param",
            Family::OrderTwo => "order-two",
            Family::Table(_) => "table",
        }
    }

    fn shape(&self) -> Option<(usize, usize, usize)> {
        // (alphabet size, order, parameter count)
        match self {
            Family::IidBernoulli => Some((2, 0, 1)),
            Family::ToySub | Family::ToySuper => Some((2, 1, 1)),
            Family::TwoParam => Some((2, 1, 2)),
            Family::OrderTwo => Some((2, 2, 1)),
            Family::Table(_) => None,
        }
    }

    fn default_domain(&self) -> Vec<(f64, f64)> {
        match self {
            Family::TwoParam => vec![(0.0, 1.0); 2],
            _ => vec![(0.0, 1.0)],
        }
    }

    /// Flattened `(history, next)` table evaluated at `theta`.
    fn table(&self, theta: &[f64]) -> Vec<f64> {
        match self {
            Family::IidBernoulli => vec![1.0 - theta[0], theta[0]],
            Family::ToySub => {
                let t = theta[0];
                let s = t.max(0.0).sqrt();
                vec![t, 1.0 - t, 1.0 - s, s]
            }
            Family::ToySuper => {
                let t = theta[0];
                let e = (-t / 3.0).exp();
                vec![t, 1.0 - t, 1.0 - e, e]
            }
            Family::TwoParam => {
                let (a, b) = (theta[0], theta[1]);
                vec![a, 1.0 - a, b, 1.0 - b]
            }
            Family::OrderTwo => order_two_ones(theta[0])
                .iter()
                .flat_map(|&p| [1.0 - p, p])
                .collect(),
            Family::Table(t) => t.clone(),
        }
    }

    /// Per-parameter derivative of [`Family::table`].
    fn table_gradient(&self, theta: &[f64]) -> Vec<Vec<f64>> {
        match self {
            Family::IidBernoulli => vec![vec![-1.0, 1.0]],
            Family::ToySub => {
                let ds = 0.5 / theta[0].sqrt();
                vec![vec![1.0, -1.0, -ds, ds]]
            }
            Family::ToySuper => {
                let de = -(-theta[0] / 3.0).exp() / 3.0;
                vec![vec![1.0, -1.0, -de, de]]
            }
            Family::TwoParam => vec![vec![1.0, -1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, -1.0]],
            Family::OrderTwo => vec![ORDER_TWO_SLOPES
                .iter()
                .flat_map(|&d| [-d, d])
                .collect()],
            Family::Table(t) => vec![vec![0.0; t.len()]],
        }
    }
}

const ORDER_TWO_SLOPES: [f64; 4] = [1.0, -0.5, 0.4, -0.5];

/// `P(next = 1 | x_{-1} x_0)` for histories 00, 01, 10, 11.
fn order_two_ones(t: f64) -> [f64; 4] {
    [t, 1.0 - 0.5 * t, 0.3 + 0.4 * t, 0.8 - 0.5 * t]
}

/// Stationary finite-alphabet process of Markov order `order`, given by a
/// theta-dependent conditional law over histories of that length.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMarkovModel {
    id: String,
    alphabet: Alphabet,
    order: usize,
    theta: Vec<f64>,
    theta_domain: Vec<(f64, f64)>,
    family: Family,
}

impl FiniteMarkovModel {
    /// One of the shipped families at the given parameter, on its default domain.
    pub fn builtin(name: &str, theta: &[f64]) -> Result<Self> {
        let family = Family::builtin(name)
            .ok_or_else(|| Error::InvalidModel(format!("unknown builtin model '{name}'")))?;
        let domain = family.default_domain();
        Self::from_family(family, theta.to_vec(), domain)
    }

    pub fn from_family(family: Family, theta: Vec<f64>, domain: Vec<(f64, f64)>) -> Result<Self> {
        let (d, order, p) = family
            .shape()
            .ok_or_else(|| Error::InvalidModel("table models need an explicit shape".into()))?;
        if theta.len() != p {
            return Err(Error::InvalidModel(format!(
                "{} takes {p} parameter(s), got {}",
                family.name(),
                theta.len()
            )));
        }
        let model = Self {
            id: family.name().to_string(),
            alphabet: Alphabet::new(d)?,
            order,
            theta,
            theta_domain: domain,
            family,
        };
        model.validate()?;
        Ok(model)
    }

    /// Theta-independent model from an explicit `(history, next)` table.
    pub fn from_table(
        alphabet_size: usize,
        order: usize,
        table: Vec<f64>,
        theta: Vec<f64>,
        theta_domain: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let alphabet = Alphabet::new(alphabet_size)?;
        let rows = alphabet
            .words(order)
            .ok_or_else(|| Error::InvalidModel("history space overflows".into()))?;
        if table.len() != rows * alphabet_size {
            return Err(Error::InvalidModel(format!(
                "table has {} entries, expected {}",
                table.len(),
                rows * alphabet_size
            )));
        }
        let model = Self {
            id: "table".into(),
            alphabet,
            order,
            theta,
            theta_domain,
            family: Family::Table(table),
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.theta.is_empty() {
            return Err(Error::InvalidModel("theta must have at least one component".into()));
        }
        if self.theta.len() != self.theta_domain.len() {
            return Err(Error::InvalidModel(
                "theta and theta_domain lengths differ".into(),
            ));
        }
        for (i, (&t, &(lo, hi))) in self.theta.iter().zip(&self.theta_domain).enumerate() {
            if !(lo <= hi) {
                return Err(Error::InvalidModel(format!("empty domain for theta[{i}]")));
            }
            if !(t >= lo && t <= hi) {
                return Err(Error::InvalidModel(format!(
                    "theta[{i}] = {t} outside [{lo}, {hi}]"
                )));
            }
        }
        let d = self.alphabet.size();
        let table = self.transition_table();
        for (h, row) in table.chunks(d).enumerate() {
            if row.iter().any(|&p| !(p >= 0.0) || p > 1.0 + 1e-12) {
                return Err(Error::InvalidModel(format!(
                    "history {h} has an entry outside [0, 1]"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidModel(format!(
                    "history {h} sums to {total}, not 1"
                )));
            }
        }
        Ok(())
    }

    /// Same family at another parameter value.
    pub fn with_theta(&self, theta: &[f64]) -> Result<Self> {
        let mut next = self.clone();
        next.theta = theta.to_vec();
        next.validate()?;
        Ok(next)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_domain(&self) -> &[(f64, f64)] {
        &self.theta_domain
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn num_params(&self) -> usize {
        self.theta.len()
    }

    /// `P(next | history)` for every history (rows) and next symbol (columns).
    pub fn transition_table(&self) -> Vec<f64> {
        self.family.table(&self.theta)
    }

    /// Table evaluated at an arbitrary parameter, without domain checks.
    pub(crate) fn transition_table_at(&self, theta: &[f64]) -> Vec<f64> {
        self.family.table(theta)
    }

    /// Analytic derivative of the transition table, one table per parameter.
    pub fn transition_gradient(&self) -> Vec<Vec<f64>> {
        self.family.table_gradient(&self.theta)
    }

    /// `P(next | history)` with `history.len() == order`.
    pub fn conditional(&self, history: &[usize], next: usize) -> f64 {
        assert_eq!(history.len(), self.order, "history length must equal the order");
        let h = self.alphabet.encode(history);
        self.transition_table()[h * self.alphabet.size() + next]
    }
}
