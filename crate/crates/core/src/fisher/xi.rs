use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this a one-site Fisher information counts as zero.
pub const XI_ZERO: f64 = 1e-30;

/// Additivity ratio `F_{1:2} / (2 F_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Xi {
    Finite(f64),
    /// `F_1` vanishes while `F_{1:2}` does not.
    Diverged,
}

impl Xi {
    /// The ratio, `+inf` when diverged.
    pub fn value(&self) -> f64 {
        match *self {
            Xi::Finite(v) => v,
            Xi::Diverged => f64::INFINITY,
        }
    }

    pub fn is_diverged(&self) -> bool {
        matches!(self, Xi::Diverged)
    }
}

pub fn xi_ratio(f12: f64, f1: f64) -> Result<Xi> {
    if !(f1 >= 0.0 && f12 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Fisher informations must be non-negative, got F12 = {f12}, F1 = {f1}"
        )));
    }
    if f1 < XI_ZERO {
        return if f12 < XI_ZERO {
            Err(Error::Indeterminate)
        } else {
            Ok(Xi::Diverged)
        };
    }
    Ok(Xi::Finite(f12 / (2.0 * f1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases() {
        assert_eq!(xi_ratio(2.0, 2.0).unwrap(), Xi::Finite(0.5));
        assert_eq!(xi_ratio(4.0, 2.0).unwrap(), Xi::Finite(1.0));
        assert_eq!(xi_ratio(1e-3, 0.0).unwrap(), Xi::Diverged);
        assert!(xi_ratio(1e-3, 0.0).unwrap().value().is_infinite());
        assert_eq!(xi_ratio(0.0, 0.0), Err(Error::Indeterminate));
        assert!(xi_ratio(-1.0, 1.0).is_err());
    }
}
