use serde::{Deserialize, Serialize};

use super::matrix::ComparisonMatrix;
use crate::error::{Error, Result};

/// Priority weights over labelled items, summing to 100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorityVector {
    pub items: Vec<String>,
    pub weights: Vec<f64>,
}

impl PriorityVector {
    /// Normalizes `raw` (non-negative, not all zero) to sum to 100.
    pub fn normalized(items: Vec<String>, raw: Vec<f64>) -> Result<Self> {
        if items.len() != raw.len() {
            return Err(Error::Validation(format!(
                "{} weights for {} items",
                raw.len(),
                items.len()
            )));
        }
        if raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Validation(
                "priority weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::Validation("priority weights sum to zero".into()));
        }
        let weights = raw.into_iter().map(|w| 100.0 * w / total).collect();
        Ok(PriorityVector { items, weights })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn weight_of(&self, item: &str) -> Option<f64> {
        self.items
            .iter()
            .position(|i| i == item)
            .map(|k| self.weights[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PriorityMethod {
    /// Normalized row geometric means.
    #[default]
    GeometricMean,
    /// Principal right eigenvector by power iteration.
    Eigenvector,
}

/// Row geometric-mean priorities, normalized to 100.
pub fn derive_priorities(matrix: &ComparisonMatrix) -> PriorityVector {
    let n = matrix.len() as f64;
    let raw = matrix
        .entries()
        .iter()
        .map(|row| (row.iter().map(|a| a.ln()).sum::<f64>() / n).exp())
        .collect();
    PriorityVector::normalized(matrix.items().to_vec(), raw)
        .expect("row geometric means of a positive matrix are positive")
}

const POWER_ITERATION_LIMIT: usize = 10_000;
const POWER_ITERATION_TOLERANCE: f64 = 1e-15;

/// Principal-eigenvector priorities, normalized to 100.
pub fn derive_priorities_eigenvector(matrix: &ComparisonMatrix) -> PriorityVector {
    let n = matrix.len();
    // The geometric-mean vector is already close to the Perron vector.
    let mut w: Vec<f64> = derive_priorities(matrix)
        .weights
        .into_iter()
        .map(|x| x / 100.0)
        .collect();
    for _ in 0..POWER_ITERATION_LIMIT {
        let mut next: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| matrix.get(i, j) * w[j]).sum())
            .collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta = next
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        w = next;
        if delta < POWER_ITERATION_TOLERANCE {
            break;
        }
    }
    PriorityVector::normalized(matrix.items().to_vec(), w)
        .expect("Perron vector of a positive matrix is positive")
}

pub fn derive_with(matrix: &ComparisonMatrix, method: PriorityMethod) -> PriorityVector {
    match method {
        PriorityMethod::GeometricMean => derive_priorities(matrix),
        PriorityMethod::Eigenvector => derive_priorities_eigenvector(matrix),
    }
}
