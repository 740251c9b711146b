//! Append-only store of per-area scores, one JSON document per snapshot plus
//! an `index.json` ordered by snapshot time.
//!
//! One writer at a time; readers only ever see whole files because every
//! write goes through a temporary file and a rename.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observability::ObservabilityScore;

const INDEX_FILE: &str = "index.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub snapshot_id: String,
    pub taken_at: DateTime<Utc>,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredScores {
    pub snapshot_id: String,
    pub taken_at: DateTime<Utc>,
    pub scores: Vec<ObservabilityScore>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Index {
    entries: Vec<HistoryEntry>,
}

#[derive(Debug)]
pub struct HistoryStore {
    root: PathBuf,
    entries: Vec<HistoryEntry>,
}

fn check_snapshot_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "snapshot id `{id}` must be non-empty ASCII letters, digits, '-', '_' or '.'"
        )))
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Load {
        path: path.to_path_buf(),
        line: Some(e.line() as u64),
        reason: e.to_string(),
    })
}

impl HistoryStore {
    /// Opens the store at `root`, creating the directory if needed.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        let index_path = root.join(INDEX_FILE);
        let entries = if index_path.exists() {
            read_json::<Index>(&index_path)?.entries
        } else {
            Vec::new()
        };
        Ok(HistoryStore { root, entries })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Entries ordered by `taken_at`.
    pub fn entries(&self) -> &[HistoryEntry] {
        &self.entries
    }

    pub fn contains(&self, snapshot_id: &str) -> bool {
        self.entries.iter().any(|e| e.snapshot_id == snapshot_id)
    }

    pub fn persist_scores(
        &mut self,
        snapshot_id: &str,
        taken_at: DateTime<Utc>,
        scores: &[ObservabilityScore],
    ) -> Result<()> {
        check_snapshot_id(snapshot_id)?;
        if self.contains(snapshot_id) {
            return Err(Error::Conflict(snapshot_id.to_string()));
        }
        let file = format!("{snapshot_id}.json");
        let doc = StoredScores {
            snapshot_id: snapshot_id.to_string(),
            taken_at,
            scores: scores.to_vec(),
        };
        let body = serde_json::to_string_pretty(&doc).expect("scores serialize");
        write_atomic(&self.root.join(&file), &body)?;

        let mut entries = self.entries.clone();
        entries.push(HistoryEntry {
            snapshot_id: snapshot_id.to_string(),
            taken_at,
            file,
        });
        entries.sort_by(|a, b| a.taken_at.cmp(&b.taken_at).then_with(|| a.snapshot_id.cmp(&b.snapshot_id)));
        let index = serde_json::to_string_pretty(&Index { entries: entries.clone() })
            .expect("index serializes");
        write_atomic(&self.root.join(INDEX_FILE), &index)?;
        self.entries = entries;
        Ok(())
    }

    pub fn load(&self, snapshot_id: &str) -> Result<StoredScores> {
        let entry = self
            .entries
            .iter()
            .find(|e| e.snapshot_id == snapshot_id)
            .ok_or_else(|| Error::UnknownSnapshot(snapshot_id.to_string()))?;
        read_json(&self.root.join(&entry.file))
    }

    pub fn latest(&self) -> Result<Option<StoredScores>> {
        self.entries
            .last()
            .map(|e| self.load(&e.snapshot_id))
            .transpose()
    }
}
