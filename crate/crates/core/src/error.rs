use std::path::PathBuf;

use thiserror::Error;

use crate::taxonomy::{ComponentKind, QuantityKind};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} token `{token}`")]
    Parse { kind: &'static str, token: String },

    #[error("{quantity} is not a measured quantity of {component} (component/quantity applicability rule)")]
    InvalidPair {
        component: ComponentKind,
        quantity: QuantityKind,
    },

    #[error("invalid comparison matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix size {0} outside supported range 2..=10")]
    UnsupportedSize(usize),

    #[error("cannot aggregate priority vectors: {0}")]
    Aggregation(String),

    #[error("incomplete questionnaires, missing contexts: {}", .gaps.join(", "))]
    IncompleteQuestionnaire { gaps: Vec<String> },

    #[error("invalid questionnaire `{expert_id}`: {reason}")]
    InvalidQuestionnaire { expert_id: String, reason: String },

    #[error("weight table has no cell for ({component}, {quantity})")]
    MissingWeight {
        component: ComponentKind,
        quantity: QuantityKind,
    },

    #[error("invalid weight tables: {0}")]
    InvalidTables(String),

    #[error("snapshot references signals absent from the inventory: {}", .unknown.join(", "))]
    Reconciliation { unknown: Vec<String> },

    #[error("snapshot has no record for signals: {}", .missing.join(", "))]
    MissingRecords { missing: Vec<String> },

    #[error("duplicate record for signal `{0}`")]
    DuplicateRecord(String),

    #[error("invalid snapshot record for `{signal_id}`: {reason}")]
    InvalidRecord { signal_id: String, reason: String },

    #[error("observability of `{scope}` is undefined: {reason}")]
    UndefinedScore { scope: String, reason: String },

    #[error(
        "area sets differ: only before [{}], only after [{}]",
        .only_before.join(", "),
        .only_after.join(", ")
    )]
    AreaMismatch {
        only_before: Vec<String>,
        only_after: Vec<String>,
    },

    #[error("{}{}: {reason}", .path.display(), .line.map(|l| format!(":{l}")).unwrap_or_default())]
    Load {
        path: PathBuf,
        line: Option<u64>,
        reason: String,
    },

    #[error("duplicate signal_id `{0}` in inventory")]
    DuplicateSignal(String),

    #[error("snapshot `{0}` already present in history store")]
    Conflict(String),

    #[error("snapshot `{0}` not found in history store")]
    UnknownSnapshot(String),

    #[error("{0}")]
    Validation(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line contract: 1 for validation
    /// failures, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}
