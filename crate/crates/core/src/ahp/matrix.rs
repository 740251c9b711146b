use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on `a[i][j] * a[j][i] == 1`.
pub const RECIPROCITY_TOLERANCE: f64 = 1e-12;

/// Bounds of the Saaty judgment scale. Values outside are accepted but
/// reported by [`ComparisonMatrix::off_scale_judgments`].
pub const SAATY_MAX: f64 = 9.0;

/// One upper-triangle judgment: item `row` is `value` times as important as
/// item `col`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Judgment {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// A positive reciprocal pairwise comparison matrix over labelled items.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    items: Vec<String>,
    entries: Vec<Vec<f64>>,
}

fn check_value(value: f64, row: usize, col: usize) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidMatrix(format!(
            "entry ({row}, {col}) = {value} is not a positive finite ratio"
        )));
    }
    Ok(())
}

impl ComparisonMatrix {
    pub fn new(items: Vec<String>, entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = items.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!(
                "need at least 2 items, got {n}"
            )));
        }
        if entries.len() != n {
            return Err(Error::InvalidMatrix(format!(
                "{} rows for {n} items",
                entries.len()
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} columns, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                check_value(v, i, j)?;
            }
            if row[i] != 1.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry ({i}, {i}) = {} must be 1",
                    row[i]
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let product = entries[i][j] * entries[j][i];
                if (product - 1.0).abs() > RECIPROCITY_TOLERANCE {
                    return Err(Error::InvalidMatrix(format!(
                        "entries ({i}, {j}) = {} and ({j}, {i}) = {} are not reciprocal",
                        entries[i][j], entries[j][i]
                    )));
                }
            }
        }
        Ok(ComparisonMatrix { items, entries })
    }

    /// Builds the full matrix from judgments covering the strict upper
    /// triangle exactly once; the diagonal and reciprocals are implied.
    pub fn from_judgments(items: Vec<String>, judgments: &[Judgment]) -> Result<Self> {
        let n = items.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!(
                "need at least 2 items, got {n}"
            )));
        }
        let mut entries = vec![vec![f64::NAN; n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for j in judgments {
            if j.row >= j.col {
                return Err(Error::InvalidMatrix(format!(
                    "judgment ({}, {}) is not in the strict upper triangle",
                    j.row, j.col
                )));
            }
            if j.col >= n {
                return Err(Error::InvalidMatrix(format!(
                    "judgment ({}, {}) out of range for {n} items",
                    j.row, j.col
                )));
            }
            check_value(j.value, j.row, j.col)?;
            if !entries[j.row][j.col].is_nan() {
                return Err(Error::InvalidMatrix(format!(
                    "duplicate judgment ({}, {})",
                    j.row, j.col
                )));
            }
            entries[j.row][j.col] = j.value;
            entries[j.col][j.row] = 1.0 / j.value;
        }
        let missing: Vec<String> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| entries[i][j].is_nan())
            .map(|(i, j)| format!("({i}, {j})"))
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidMatrix(format!(
                "missing judgments {}",
                missing.join(", ")
            )));
        }
        ComparisonMatrix::new(items, entries)
    }

    /// Fully consistent matrix `a[i][j] = w[i] / w[j]`.
    pub fn from_weights(items: Vec<String>, weights: &[f64]) -> Result<Self> {
        if items.len() != weights.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} weights for {} items",
                weights.len(),
                items.len()
            )));
        }
        let judgments: Vec<Judgment> = (0..weights.len())
            .flat_map(|i| ((i + 1)..weights.len()).map(move |j| (i, j)))
            .map(|(i, j)| Judgment {
                row: i,
                col: j,
                value: weights[i] / weights[j],
            })
            .collect();
        ComparisonMatrix::from_judgments(items, &judgments)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    /// Upper-triangle judgments, the inverse of [`Self::from_judgments`].
    pub fn judgments(&self) -> Vec<Judgment> {
        let n = self.len();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| Judgment {
                row: i,
                col: j,
                value: self.entries[i][j],
            })
            .collect()
    }

    /// Reorders items so that new position `k` holds old item `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::InvalidMatrix(format!(
                "{order:?} is not a permutation of 0..{n}"
            )));
        }
        let items = order.iter().map(|&k| self.items[k].clone()).collect();
        let entries = order
            .iter()
            .map(|&r| order.iter().map(|&c| self.entries[r][c]).collect())
            .collect();
        Ok(ComparisonMatrix { items, entries })
    }

    /// Upper-triangle judgments outside `[1/9, 9]`.
    pub fn off_scale_judgments(&self) -> Vec<Judgment> {
        self.judgments()
            .into_iter()
            .filter(|j| j.value > SAATY_MAX || j.value < 1.0 / SAATY_MAX)
            .collect()
    }
}
