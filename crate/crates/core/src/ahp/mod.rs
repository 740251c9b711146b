//! Pairwise-comparison (AHP) weighting: priorities from reciprocal judgment
//! matrices, consistency checking, expert aggregation, and assembly of the
//! M and N weight tables.

mod aggregate;
mod consistency;
mod matrix;
mod priority;
mod questionnaire;
mod tables;

pub use aggregate::{aggregate_experts, aggregate_judgments, AggregationMode};
pub use consistency::{
    consistency, consistency_with_threshold, random_index, ConsistencyReport, DEFAULT_CR_THRESHOLD,
    MAX_SIZE, MIN_SIZE, RANDOM_INDEX,
};
pub use matrix::{ComparisonMatrix, Judgment, RECIPROCITY_TOLERANCE, SAATY_MAX};
pub use priority::{
    derive_priorities, derive_priorities_eigenvector, derive_with, PriorityMethod, PriorityVector,
};
pub use questionnaire::{
    build_weight_tables, ComparisonContext, ContextConsistency, DerivationOptions, Questionnaire,
    QuestionnaireMatrix, WeightDerivation,
};
pub use tables::{signal_weight, WeightTables, TRANSCRIPTION_SUM_TOLERANCE};
