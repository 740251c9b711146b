use std::collections::HashMap;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::csv_rows::{flag, parse_flag, read_rows, render_rows, write_rows};
use super::inventory::Inventory;
use crate::error::{Error, Result};
use crate::observability::SnapshotRecord;
use crate::taxonomy::ValidityTag;

pub const SNAPSHOT_COLUMNS: [&str; 4] = ["signal_id", "tag", "se_flagged", "timestamp"];

/// What to do with inventory signals that a snapshot does not mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingSignalPolicy {
    /// Fill with a FAULTY record: no information arrived.
    #[default]
    Faulty,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotSet {
    pub snapshot_id: String,
    /// One record per inventory signal, in inventory order.
    pub records: Vec<SnapshotRecord>,
    pub taken_at: DateTime<Utc>,
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Parses snapshot CSV rows without reconciling them.
pub fn parse_snapshot_records(path: &Path, text: &str) -> Result<Vec<SnapshotRecord>> {
    let mut records = Vec::new();
    read_rows(path, text, &SNAPSHOT_COLUMNS, |_, r| {
        let timestamp = DateTime::parse_from_rfc3339(&r[3])
            .map_err(|e| Error::Validation(format!("timestamp `{}`: {e}", &r[3])))?
            .with_timezone(&Utc);
        let record = SnapshotRecord::new(
            &r[0],
            r[1].parse::<ValidityTag>()?,
            parse_flag(&r[2], "se_flagged").map_err(Error::Validation)?,
            timestamp,
        )?;
        records.push(record);
        Ok(())
    })?;
    Ok(records)
}

/// Matches records to the inventory: unknown ids and duplicates are errors,
/// missing signals are handled per `missing`.
pub fn reconcile(
    snapshot_id: impl Into<String>,
    records: Vec<SnapshotRecord>,
    inventory: &Inventory,
    missing: MissingSignalPolicy,
) -> Result<SnapshotSet> {
    let snapshot_id = snapshot_id.into();
    let taken_at = records
        .iter()
        .map(|r| r.timestamp)
        .max()
        .ok_or_else(|| Error::Validation(format!("snapshot `{snapshot_id}` has no records")))?;
    let unknown: Vec<String> = records
        .iter()
        .filter(|r| !inventory.contains(&r.signal_id))
        .map(|r| r.signal_id.clone())
        .collect();
    if !unknown.is_empty() {
        return Err(Error::Reconciliation { unknown });
    }
    let mut by_id: HashMap<String, SnapshotRecord> = HashMap::with_capacity(records.len());
    for r in records {
        if by_id.contains_key(&r.signal_id) {
            return Err(Error::DuplicateRecord(r.signal_id));
        }
        by_id.insert(r.signal_id.clone(), r);
    }
    let absent: Vec<String> = inventory
        .signals
        .iter()
        .filter(|s| !by_id.contains_key(&s.signal_id))
        .map(|s| s.signal_id.clone())
        .collect();
    if missing == MissingSignalPolicy::Error && !absent.is_empty() {
        return Err(Error::MissingRecords { missing: absent });
    }
    let records = inventory
        .signals
        .iter()
        .map(|s| {
            by_id.remove(&s.signal_id).unwrap_or_else(|| SnapshotRecord {
                signal_id: s.signal_id.clone(),
                tag: ValidityTag::Faulty,
                se_flagged: false,
                timestamp: taken_at,
            })
        })
        .collect();
    Ok(SnapshotSet {
        snapshot_id,
        records,
        taken_at,
    })
}

/// Loads a snapshot CSV and reconciles it against `inventory`. The snapshot
/// id is the file stem; `taken_at` is the latest record timestamp.
pub fn load_snapshot(
    path: impl AsRef<Path>,
    inventory: &Inventory,
    missing: MissingSignalPolicy,
) -> Result<SnapshotSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let records = parse_snapshot_records(path, &text)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "snapshot".into());
    reconcile(id, records, inventory, missing)
}

fn snapshot_rows(records: &[SnapshotRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            vec![
                r.signal_id.clone(),
                r.tag.to_string(),
                flag(r.se_flagged).to_string(),
                format_timestamp(&r.timestamp),
            ]
        })
        .collect()
}

pub fn snapshot_to_csv(records: &[SnapshotRecord]) -> String {
    render_rows(&SNAPSHOT_COLUMNS, snapshot_rows(records))
}

pub fn write_snapshot(path: impl AsRef<Path>, records: &[SnapshotRecord]) -> Result<()> {
    write_rows(path.as_ref(), &SNAPSHOT_COLUMNS, snapshot_rows(records))
}
