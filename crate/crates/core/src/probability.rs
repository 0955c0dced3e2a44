use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const SUM_TOL: f64 = 1e-9;

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Accepts entries `>= -1e-12` summing to 1 within `1e-9`; tiny negatives
    /// are clamped and the vector renormalized.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(invalid("probability vector is empty"));
        }
        if p.iter().any(|x| !x.is_finite() || *x < -1e-12) {
            return Err(invalid("probabilities must be finite and nonnegative"));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(invalid(format!("probabilities sum to {s}, not 1")));
        }
        Ok(Self(p.into_iter().map(|x| x.max(0.0) / s).collect()))
    }

    pub fn uniform(d: usize) -> Self {
        Self(vec![1.0 / d as f64; d])
    }

    pub(crate) fn from_trusted(p: Vec<f64>) -> Self {
        Self(p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Entries in nonincreasing order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Outer product, i.e. the distribution of independent pairs.
    pub fn tensor(&self, other: &Self) -> Self {
        Self(self.0.iter().flat_map(|a| other.0.iter().map(move |b| a * b)).collect())
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = crate::error::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for ProbabilityVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.4]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
        assert!(serde_json::from_str::<ProbabilityVector>("[0.2, 0.2]").is_err());
    }
}
