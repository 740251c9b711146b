use serde::{Deserialize, Serialize};

use super::matrix::ComparisonMatrix;
use super::priority::PriorityVector;
use crate::error::{Error, Result};

/// Conventional acceptance bound on the consistency ratio.
pub const DEFAULT_CR_THRESHOLD: f64 = 0.10;

/// Saaty random-index constants, indexed by `n - 1` for `n` in 1..=10.
pub const RANDOM_INDEX: [f64; 10] = [0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49];

pub const MIN_SIZE: usize = 2;
pub const MAX_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub lambda_max: f64,
    pub consistency_index: f64,
    pub consistency_ratio: f64,
    pub acceptable: bool,
}

pub fn random_index(n: usize) -> Result<f64> {
    if !(MIN_SIZE..=MAX_SIZE).contains(&n) {
        return Err(Error::UnsupportedSize(n));
    }
    Ok(RANDOM_INDEX[n - 1])
}

/// Consistency check with the default threshold.
pub fn consistency(matrix: &ComparisonMatrix, priorities: &PriorityVector) -> Result<ConsistencyReport> {
    consistency_with_threshold(matrix, priorities, DEFAULT_CR_THRESHOLD)
}

/// `lambda_max` is the mean of `(A w)_i / w_i`. For a positive reciprocal
/// matrix this is at least `n` for any positive `w`, so a negative index can
/// only come from rounding and is clamped to zero.
pub fn consistency_with_threshold(
    matrix: &ComparisonMatrix,
    priorities: &PriorityVector,
    threshold: f64,
) -> Result<ConsistencyReport> {
    let n = matrix.len();
    let ri = random_index(n)?;
    if priorities.items != matrix.items() {
        return Err(Error::Validation(
            "priority vector items do not match the matrix".into(),
        ));
    }
    let w = &priorities.weights;
    let lambda_max = (0..n)
        .map(|i| {
            let row: f64 = (0..n).map(|j| matrix.get(i, j) * w[j]).sum();
            row / w[i]
        })
        .sum::<f64>()
        / n as f64;

    let (consistency_index, consistency_ratio) = if n == 2 {
        (0.0, 0.0)
    } else {
        let ci = ((lambda_max - n as f64) / (n as f64 - 1.0)).max(0.0);
        (ci, ci / ri)
    };
    Ok(ConsistencyReport {
        lambda_max,
        consistency_index,
        consistency_ratio,
        acceptable: consistency_ratio <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ahp::priority::derive_priorities;

    fn matrix(rows: &[&[f64]]) -> ComparisonMatrix {
        let items = (0..rows.len()).map(|i| format!("x{i}")).collect();
        ComparisonMatrix::new(items, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn consistent_matrix_has_zero_ratio() {
        let m = matrix(&[&[1.0, 2.0, 4.0], &[0.5, 1.0, 2.0], &[0.25, 0.5, 1.0]]);
        let r = consistency(&m, &derive_priorities(&m)).unwrap();
        assert!((r.lambda_max - 3.0).abs() < 1e-12);
        assert!(r.consistency_index < 1e-12);
        assert!(r.consistency_ratio < 1e-12);
        assert!(r.acceptable);
    }

    #[test]
    fn two_by_two_is_always_consistent() {
        for a in [1.0, 3.0, 9.0, 1.0 / 7.0, 123.4] {
            let m = matrix(&[&[1.0, a], &[1.0 / a, 1.0]]);
            let r = consistency(&m, &derive_priorities(&m)).unwrap();
            assert_eq!(r.consistency_ratio, 0.0);
            assert_eq!(r.consistency_index, 0.0);
            assert!(r.acceptable);
        }
    }

    #[test]
    fn cyclic_judgments_are_inconsistent() {
        let rows: &[&[f64]] = &[
            &[1.0, 9.0, 1.0 / 9.0],
            &[1.0 / 9.0, 1.0, 9.0],
            &[9.0, 1.0 / 9.0, 1.0],
        ];
        // Oracle: every row product is 1, so priorities are uniform and
        // (A w)_i / w_i is the row sum 1 + 9 + 1/9 for every row.
        let row_sum = 1.0 + 9.0 + 1.0 / 9.0;
        let expected_ci = (row_sum - 3.0) / 2.0;
        let expected_cr = expected_ci / 0.58;
        assert!(expected_cr > 6.0);

        let m = matrix(rows);
        let p = derive_priorities(&m);
        let r = consistency(&m, &p).unwrap();
        assert!((r.lambda_max - row_sum).abs() < 1e-9);
        assert!((r.consistency_ratio - expected_cr).abs() < 1e-9);
        assert!(!r.acceptable);
    }

    #[test]
    fn threshold_is_configurable() {
        let m = matrix(&[
            &[1.0, 3.0, 5.0],
            &[1.0 / 3.0, 1.0, 3.0],
            &[1.0 / 5.0, 1.0 / 3.0, 1.0],
        ]);
        let p = derive_priorities(&m);
        let r = consistency(&m, &p).unwrap();
        assert!(r.consistency_ratio > 0.0 && r.acceptable);
        let strict = consistency_with_threshold(&m, &p, r.consistency_ratio / 2.0).unwrap();
        assert!(!strict.acceptable);
    }

    #[test]
    fn unsupported_size() {
        let items: Vec<String> = (0..11).map(|i| i.to_string()).collect();
        let m = ComparisonMatrix::from_weights(items, &[1.0; 11]).unwrap();
        let p = derive_priorities(&m);
        assert!(matches!(consistency(&m, &p), Err(Error::UnsupportedSize(11))));
    }
}
