use serde::{Deserialize, Serialize};

use super::matrix::ComparisonMatrix;
use super::priority::PriorityVector;
use crate::error::{Error, Result};

/// How multiple experts are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMode {
    /// Average each expert's derived priorities.
    #[default]
    Priorities,
    /// Element-wise geometric mean of judgment matrices, then derive.
    Judgments,
}

fn check_expert_weights(count: usize, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    match weights {
        None => Ok(vec![1.0; count]),
        Some(w) if w.len() != count => Err(Error::Aggregation(format!(
            "{} expert weights for {count} experts",
            w.len()
        ))),
        Some(w) if w.iter().any(|x| !x.is_finite() || *x <= 0.0) => Err(Error::Aggregation(
            "expert weights must be positive and finite".into(),
        )),
        Some(w) => Ok(w.to_vec()),
    }
}

/// Arithmetic (optionally weighted) mean of priority vectors over identical
/// item lists, renormalized to 100.
pub fn aggregate_experts(
    vectors: &[PriorityVector],
    expert_weights: Option<&[f64]>,
) -> Result<PriorityVector> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::Aggregation("no priority vectors".into()))?;
    if let Some(bad) = vectors.iter().position(|v| v.items != first.items) {
        return Err(Error::Aggregation(format!(
            "vector {bad} has items {:?}, expected {:?}",
            vectors[bad].items, first.items
        )));
    }
    let ew = check_expert_weights(vectors.len(), expert_weights)?;
    let total: f64 = ew.iter().sum();
    let mean = (0..first.len())
        .map(|i| {
            vectors
                .iter()
                .zip(&ew)
                .map(|(v, w)| w * v.weights[i])
                .sum::<f64>()
                / total
        })
        .collect();
    PriorityVector::normalized(first.items.clone(), mean)
}

/// Element-wise (optionally weighted) geometric mean of judgment matrices
/// over identical item lists. The result is again positive reciprocal.
pub fn aggregate_judgments(
    matrices: &[ComparisonMatrix],
    expert_weights: Option<&[f64]>,
) -> Result<ComparisonMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::Aggregation("no matrices".into()))?;
    if let Some(bad) = matrices.iter().position(|m| m.items() != first.items()) {
        return Err(Error::Aggregation(format!(
            "matrix {bad} has items {:?}, expected {:?}",
            matrices[bad].items(),
            first.items()
        )));
    }
    let ew = check_expert_weights(matrices.len(), expert_weights)?;
    let total: f64 = ew.iter().sum();
    let n = first.len();
    let mut entries = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let log_mean = matrices
                .iter()
                .zip(&ew)
                .map(|(m, w)| w * m.get(i, j).ln())
                .sum::<f64>()
                / total;
            let v = log_mean.exp();
            entries[i][j] = v;
            entries[j][i] = 1.0 / v;
        }
    }
    ComparisonMatrix::new(first.items().to_vec(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ahp::priority::derive_priorities;

    fn pv(w: &[f64]) -> PriorityVector {
        PriorityVector {
            items: (0..w.len()).map(|i| format!("x{i}")).collect(),
            weights: w.to_vec(),
        }
    }

    #[test]
    fn symmetric_pair_averages_to_half() {
        let out = aggregate_experts(&[pv(&[60.0, 40.0]), pv(&[40.0, 60.0])], None).unwrap();
        assert_eq!(out.weights, vec![50.0, 50.0]);
    }

    #[test]
    fn single_expert_is_identity() {
        let out = aggregate_experts(&[pv(&[50.0, 30.0, 20.0])], None).unwrap();
        assert_eq!(out.weights, vec![50.0, 30.0, 20.0]);
    }

    #[test]
    fn weighted_experts() {
        // (3*60 + 1*40) / 4 = 55, (3*40 + 1*60) / 4 = 45
        let out = aggregate_experts(&[pv(&[60.0, 40.0]), pv(&[40.0, 60.0])], Some(&[3.0, 1.0])).unwrap();
        assert!((out.weights[0] - 55.0).abs() < 1e-12);
        assert!((out.weights[1] - 45.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_items_rejected() {
        let mut other = pv(&[50.0, 50.0]);
        other.items[1] = "y".into();
        assert!(matches!(
            aggregate_experts(&[pv(&[50.0, 50.0]), other], None),
            Err(Error::Aggregation(_))
        ));
        assert!(aggregate_experts(&[], None).is_err());
        assert!(aggregate_experts(&[pv(&[50.0, 50.0])], Some(&[0.0])).is_err());
        assert!(aggregate_experts(&[pv(&[50.0, 50.0])], Some(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn judgment_aggregation_of_opposites_is_indifferent() {
        let items = vec!["a".to_string(), "b".to_string()];
        let a = ComparisonMatrix::from_weights(items.clone(), &[3.0, 1.0]).unwrap();
        let b = ComparisonMatrix::from_weights(items, &[1.0, 3.0]).unwrap();
        let m = aggregate_judgments(&[a, b], None).unwrap();
        assert!((m.get(0, 1) - 1.0).abs() < 1e-15);
        let p = derive_priorities(&m);
        assert!((p.weights[0] - 50.0).abs() < 1e-12);
    }
}
