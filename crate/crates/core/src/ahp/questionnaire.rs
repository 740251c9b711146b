//! Expert questionnaires and derivation of the weight tables from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate_experts, aggregate_judgments, AggregationMode};
use super::consistency::{consistency_with_threshold, ConsistencyReport, DEFAULT_CR_THRESHOLD};
use super::matrix::{ComparisonMatrix, Judgment};
use super::priority::{derive_with, PriorityMethod, PriorityVector};
use super::tables::WeightTables;
use crate::error::{Error, Result};
use crate::taxonomy::{ComponentKind, QuantityKind};

/// What a comparison matrix ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComparisonContext {
    /// Quantities of one component against each other (an M-table column).
    QuantitiesWithinComponent { component: ComponentKind },
    /// Components reporting one quantity against each other (an N-table column).
    ComponentsWithinQuantity { quantity: QuantityKind },
}

impl ComparisonContext {
    /// All eleven contexts: component contexts first, then quantity contexts.
    pub fn all() -> Vec<ComparisonContext> {
        ComponentKind::ALL
            .into_iter()
            .map(|component| ComparisonContext::QuantitiesWithinComponent { component })
            .chain(
                QuantityKind::ALL
                    .into_iter()
                    .map(|quantity| ComparisonContext::ComponentsWithinQuantity { quantity }),
            )
            .collect()
    }

    /// Canonical item tokens compared in this context.
    pub fn items(&self) -> Vec<String> {
        match self {
            ComparisonContext::QuantitiesWithinComponent { component } => component
                .quantities()
                .iter()
                .map(|q| q.token().to_string())
                .collect(),
            ComparisonContext::ComponentsWithinQuantity { quantity } => quantity
                .components()
                .iter()
                .map(|c| c.token().to_string())
                .collect(),
        }
    }

    fn canonical_token(&self, raw: &str) -> Result<String> {
        Ok(match self {
            ComparisonContext::QuantitiesWithinComponent { .. } => {
                raw.parse::<QuantityKind>()?.token().to_string()
            }
            ComparisonContext::ComponentsWithinQuantity { .. } => {
                raw.parse::<ComponentKind>()?.token().to_string()
            }
        })
    }
}

impl fmt::Display for ComparisonContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComparisonContext::QuantitiesWithinComponent { component } => {
                write!(f, "quantities_within_component/{component}")
            }
            ComparisonContext::ComponentsWithinQuantity { quantity } => {
                write!(f, "components_within_quantity/{quantity}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionnaireMatrix {
    pub context: ComparisonContext,
    pub items: Vec<String>,
    pub judgments: Vec<Judgment>,
}

impl QuestionnaireMatrix {
    /// Parses and validates the matrix, returning it in canonical item order.
    pub fn to_matrix(&self) -> Result<ComparisonMatrix> {
        let canonical = self.context.items();
        let tokens = self
            .items
            .iter()
            .map(|raw| self.context.canonical_token(raw))
            .collect::<Result<Vec<_>>>()?;
        let given: BTreeSet<&String> = tokens.iter().collect();
        let wanted: BTreeSet<&String> = canonical.iter().collect();
        if given != wanted || tokens.len() != canonical.len() {
            return Err(Error::InvalidMatrix(format!(
                "{}: items {:?} do not match the applicable set {:?}",
                self.context, self.items, canonical
            )));
        }
        let matrix = ComparisonMatrix::from_judgments(tokens.clone(), &self.judgments)
            .map_err(|e| Error::InvalidMatrix(format!("{}: {e}", self.context)))?;
        let order: Vec<usize> = canonical
            .iter()
            .map(|c| tokens.iter().position(|t| t == c).expect("sets are equal"))
            .collect();
        matrix.permuted(&order)
    }
}

/// One expert's answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Questionnaire {
    pub expert_id: String,
    pub matrices: Vec<QuestionnaireMatrix>,
}

impl Questionnaire {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("questionnaire: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Load {
            path: path.to_path_buf(),
            line: Some(e.line() as u64),
            reason: e.to_string(),
        })
    }

    /// Parsed matrices by context. Duplicated contexts and malformed
    /// matrices are errors; missing contexts are not.
    pub fn matrices_by_context(&self) -> Result<BTreeMap<ComparisonContext, ComparisonMatrix>> {
        if self.expert_id.trim().is_empty() {
            return Err(Error::InvalidQuestionnaire {
                expert_id: self.expert_id.clone(),
                reason: "expert_id must not be empty".into(),
            });
        }
        let mut out = BTreeMap::new();
        for qm in &self.matrices {
            let m = qm.to_matrix().map_err(|e| Error::InvalidQuestionnaire {
                expert_id: self.expert_id.clone(),
                reason: e.to_string(),
            })?;
            if out.insert(qm.context, m).is_some() {
                return Err(Error::InvalidQuestionnaire {
                    expert_id: self.expert_id.clone(),
                    reason: format!("context {} appears twice", qm.context),
                });
            }
        }
        Ok(out)
    }

    pub fn missing_contexts(&self) -> Vec<ComparisonContext> {
        let present: BTreeSet<_> = self.matrices.iter().map(|m| m.context).collect();
        ComparisonContext::all()
            .into_iter()
            .filter(|c| !present.contains(c))
            .collect()
    }

    /// A complete questionnaire whose judgments are all 1.
    pub fn indifferent(expert_id: impl Into<String>) -> Self {
        let matrices = ComparisonContext::all()
            .into_iter()
            .map(|context| {
                let items = context.items();
                let n = items.len();
                let judgments = (0..n)
                    .flat_map(|i| ((i + 1)..n).map(move |j| Judgment { row: i, col: j, value: 1.0 }))
                    .collect();
                QuestionnaireMatrix {
                    context,
                    items,
                    judgments,
                }
            })
            .collect();
        Questionnaire {
            expert_id: expert_id.into(),
            matrices,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivationOptions {
    pub method: PriorityMethod,
    pub aggregation: AggregationMode,
    pub cr_threshold: f64,
}

impl Default for DerivationOptions {
    fn default() -> Self {
        DerivationOptions {
            method: PriorityMethod::GeometricMean,
            aggregation: AggregationMode::Priorities,
            cr_threshold: DEFAULT_CR_THRESHOLD,
        }
    }
}

/// Consistency of one matrix: one expert's, or the aggregate when
/// judgments are pooled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextConsistency {
    pub context: ComparisonContext,
    pub expert_id: Option<String>,
    pub report: ConsistencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDerivation {
    pub tables: WeightTables,
    pub consistency: Vec<ContextConsistency>,
    pub warnings: Vec<String>,
}

impl WeightDerivation {
    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
    }
}

/// Derives both weight tables from a set of complete questionnaires.
///
/// Inconsistent or off-scale matrices produce warnings; only structural
/// problems and missing contexts are errors.
pub fn build_weight_tables(
    questionnaires: &[Questionnaire],
    options: &DerivationOptions,
) -> Result<WeightDerivation> {
    if questionnaires.is_empty() {
        return Err(Error::IncompleteQuestionnaire {
            gaps: vec!["no questionnaires supplied".into()],
        });
    }
    let parsed = questionnaires
        .iter()
        .map(Questionnaire::matrices_by_context)
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<String> = questionnaires
        .iter()
        .flat_map(|q| {
            q.missing_contexts()
                .into_iter()
                .map(move |c| format!("{}: {c}", q.expert_id))
        })
        .collect();
    if !gaps.is_empty() {
        return Err(Error::IncompleteQuestionnaire { gaps });
    }

    let mut consistency = Vec::new();
    let mut warnings = Vec::new();
    let mut columns: BTreeMap<ComparisonContext, PriorityVector> = BTreeMap::new();

    for context in ComparisonContext::all() {
        let mut per_expert = Vec::with_capacity(parsed.len());
        let mut matrices = Vec::with_capacity(parsed.len());
        for (q, by_context) in questionnaires.iter().zip(&parsed) {
            let matrix = &by_context[&context];
            let priorities = derive_with(matrix, options.method);
            let report = consistency_with_threshold(matrix, &priorities, options.cr_threshold)?;
            if !report.acceptable {
                warnings.push(format!(
                    "{} {context}: consistency ratio {:.3} exceeds {:.2}",
                    q.expert_id, report.consistency_ratio, options.cr_threshold
                ));
            }
            let off_scale = matrix.off_scale_judgments();
            if !off_scale.is_empty() {
                warnings.push(format!(
                    "{} {context}: {} judgment(s) outside the 1/9..9 scale",
                    q.expert_id,
                    off_scale.len()
                ));
            }
            consistency.push(ContextConsistency {
                context,
                expert_id: Some(q.expert_id.clone()),
                report,
            });
            per_expert.push(priorities);
            matrices.push(matrix.clone());
        }

        let combined = match options.aggregation {
            AggregationMode::Priorities => aggregate_experts(&per_expert, None)?,
            AggregationMode::Judgments => {
                let pooled = aggregate_judgments(&matrices, None)?;
                let priorities = derive_with(&pooled, options.method);
                let report = consistency_with_threshold(&pooled, &priorities, options.cr_threshold)?;
                if !report.acceptable {
                    warnings.push(format!(
                        "pooled {context}: consistency ratio {:.3} exceeds {:.2}",
                        report.consistency_ratio, options.cr_threshold
                    ));
                }
                consistency.push(ContextConsistency {
                    context,
                    expert_id: None,
                    report,
                });
                priorities
            }
        };
        columns.insert(context, combined);
    }

    let lookup = |context: ComparisonContext, item: &str| -> f64 {
        columns[&context]
            .weight_of(item)
            .expect("canonical items are present in every column")
    };
    let tables = WeightTables::from_fn(
        |c, q| lookup(ComparisonContext::QuantitiesWithinComponent { component: c }, q.token()),
        |q, c| lookup(ComparisonContext::ComponentsWithinQuantity { quantity: q }, c.token()),
    )?;
    Ok(WeightDerivation {
        tables,
        consistency,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_context(
        mut q: Questionnaire,
        context: ComparisonContext,
        judgments: Vec<Judgment>,
    ) -> Questionnaire {
        let m = q.matrices.iter_mut().find(|m| m.context == context).unwrap();
        m.judgments = judgments;
        q
    }

    #[test]
    fn context_set() {
        let all = ComparisonContext::all();
        assert_eq!(all.len(), 11);
        assert!(matches!(all[0], ComparisonContext::QuantitiesWithinComponent { .. }));
        assert!(matches!(all[10], ComparisonContext::ComponentsWithinQuantity { .. }));
    }

    #[test]
    fn context_json_shape() {
        let c = ComparisonContext::ComponentsWithinQuantity {
            quantity: QuantityKind::Kv,
        };
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"kind":"components_within_quantity","quantity":"KV"}"#
        );
    }

    #[test]
    fn indifference_gives_uniform_columns() {
        let d = build_weight_tables(&[Questionnaire::indifferent("e1")], &DerivationOptions::default())
            .unwrap();
        assert!(d.warnings.is_empty());
        assert_eq!(d.consistency.len(), 11);
        let gen = &d.tables.m_table()[&ComponentKind::Generator];
        for w in gen.values() {
            assert!((w - 25.0).abs() < 1e-12);
        }
        let status = &d.tables.n_table()[&QuantityKind::Status];
        for w in status.values() {
            assert!((w - 100.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn opposite_experts_cancel() {
        let ctx = ComparisonContext::QuantitiesWithinComponent {
            component: ComponentKind::Busbar,
        };
        let a = with_context(Questionnaire::indifferent("a"), ctx, vec![Judgment { row: 0, col: 1, value: 3.0 }]);
        let b = with_context(
            Questionnaire::indifferent("b"),
            ctx,
            vec![Judgment { row: 0, col: 1, value: 1.0 / 3.0 }],
        );
        // expert a: (75, 25); expert b: (25, 75); mean (50, 50)
        for aggregation in [AggregationMode::Priorities, AggregationMode::Judgments] {
            let opts = DerivationOptions {
                aggregation,
                ..Default::default()
            };
            let d = build_weight_tables(&[a.clone(), b.clone()], &opts).unwrap();
            let col = &d.tables.m_table()[&ComponentKind::Busbar];
            assert!((col[&QuantityKind::Kv] - 50.0).abs() < 1e-12);
            assert!((col[&QuantityKind::Status] - 50.0).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_context_lists_gap() {
        let mut q = Questionnaire::indifferent("e7");
        q.matrices.retain(|m| {
            m.context
                != ComparisonContext::QuantitiesWithinComponent {
                    component: ComponentKind::Generator,
                }
        });
        let err = build_weight_tables(&[q], &DerivationOptions::default()).unwrap_err();
        match err {
            Error::IncompleteQuestionnaire { gaps } => {
                assert_eq!(gaps, vec!["e7: quantities_within_component/GENERATOR".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn items_may_arrive_in_any_order() {
        let ctx = ComparisonContext::QuantitiesWithinComponent {
            component: ComponentKind::Busbar,
        };
        let mut q = Questionnaire::indifferent("e");
        let m = q.matrices.iter_mut().find(|m| m.context == ctx).unwrap();
        // STATUS listed first and judged 4x as important as kv
        m.items = vec!["status".into(), "kv".into()];
        m.judgments = vec![Judgment { row: 0, col: 1, value: 4.0 }];
        let d = build_weight_tables(&[q], &DerivationOptions::default()).unwrap();
        let col = &d.tables.m_table()[&ComponentKind::Busbar];
        assert!((col[&QuantityKind::Status] - 80.0).abs() < 1e-12);
        assert!((col[&QuantityKind::Kv] - 20.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_items_rejected() {
        let ctx = ComparisonContext::QuantitiesWithinComponent {
            component: ComponentKind::Busbar,
        };
        let mut q = Questionnaire::indifferent("e");
        q.matrices.iter_mut().find(|m| m.context == ctx).unwrap().items = vec!["KV".into(), "TAP".into()];
        let err = build_weight_tables(&[q], &DerivationOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidQuestionnaire { .. }), "{err}");
    }

    #[test]
    fn inconsistent_matrix_warns() {
        let ctx = ComparisonContext::ComponentsWithinQuantity {
            quantity: QuantityKind::Kv,
        };
        let q = with_context(
            Questionnaire::indifferent("e"),
            ctx,
            vec![
                Judgment { row: 0, col: 1, value: 9.0 },
                Judgment { row: 0, col: 2, value: 1.0 / 9.0 },
                Judgment { row: 1, col: 2, value: 9.0 },
            ],
        );
        let d = build_weight_tables(&[q], &DerivationOptions::default()).unwrap();
        assert_eq!(d.warnings.len(), 1);
        assert!(d.warnings[0].contains("components_within_quantity/KV"));
    }

    #[test]
    fn duplicate_context_rejected() {
        let mut q = Questionnaire::indifferent("e");
        let dup = q.matrices[0].clone();
        q.matrices.push(dup);
        assert!(q.matrices_by_context().is_err());
    }
}
