//! Unweighted and weighted observability indices.
//!
//! The unweighted index is the share of a scope's signals that carry correct
//! data. The weighted index does the same with each in-scope signal counted
//! at its `M × N` importance, doubled when the signal is named in an
//! operating instruction. Both are percentages.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::ahp::{signal_weight, WeightTables};
use crate::error::{Error, Result};
use crate::taxonomy::{SignalDescriptor, ValidityTag};

/// Weight multiplier for signals present in an operating instruction.
pub const INSTRUCTION_MULTIPLIER: f64 = 2.0;

/// Deltas smaller than this many percentage points count as unchanged.
pub const UNCHANGED_BAND: f64 = 0.5;

/// Scope label used when scoring a whole inventory at once.
pub const NETWORK_SCOPE: &str = "network";

/// One signal's status in a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub signal_id: String,
    pub tag: ValidityTag,
    /// State estimation found this nominally valid value inconsistent.
    pub se_flagged: bool,
    pub timestamp: DateTime<Utc>,
}

impl SnapshotRecord {
    pub fn new(
        signal_id: impl Into<String>,
        tag: ValidityTag,
        se_flagged: bool,
        timestamp: DateTime<Utc>,
    ) -> Result<Self> {
        let record = SnapshotRecord {
            signal_id: signal_id.into(),
            tag,
            se_flagged,
            timestamp,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        if self.signal_id.is_empty() || self.signal_id.trim() != self.signal_id {
            return Err(Error::Validation(format!(
                "signal_id `{}` is empty or padded with whitespace",
                self.signal_id
            )));
        }
        if self.se_flagged && self.tag != ValidityTag::Valid {
            return Err(Error::InvalidRecord {
                signal_id: self.signal_id.clone(),
                reason: format!("se_flagged requires tag V, found {}", self.tag),
            });
        }
        Ok(())
    }
}

/// Which records count as incorrect data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvalidityPolicy {
    pub invalid_tags: BTreeSet<ValidityTag>,
    /// Count VALID records flagged by state estimation as incorrect.
    pub count_se_flags: bool,
}

impl Default for InvalidityPolicy {
    fn default() -> Self {
        InvalidityPolicy {
            invalid_tags: [ValidityTag::Faulty, ValidityTag::NonCurrent, ValidityTag::Invalid]
                .into_iter()
                .collect(),
            count_se_flags: true,
        }
    }
}

impl InvalidityPolicy {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("invalidity policy: {e}")))
    }

    fn tag_is_invalid(&self, tag: ValidityTag) -> bool {
        self.invalid_tags.contains(&tag)
    }
}

pub fn is_invalid(record: &SnapshotRecord, policy: &InvalidityPolicy) -> bool {
    policy.tag_is_invalid(record.tag)
        || (record.tag == ValidityTag::Valid && record.se_flagged && policy.count_se_flags)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityScore {
    pub scope: String,
    pub total_raw: u64,
    pub invalid_raw: u64,
    /// Unweighted index, percent.
    pub unweighted: f64,
    pub total_weighted: f64,
    pub invalid_weighted: f64,
    /// Weighted index, percent.
    pub weighted: f64,
}

/// `100 × (total − invalid) / total`.
pub fn unweighted_observability(total: u64, invalid: u64) -> Result<f64> {
    if total == 0 {
        return Err(Error::UndefinedScore {
            scope: "(counts)".into(),
            reason: "no signals".into(),
        });
    }
    if invalid > total {
        return Err(Error::Validation(format!(
            "{invalid} invalid signals out of {total}"
        )));
    }
    Ok(percent(total as f64, invalid as f64))
}

// Multiplying before dividing keeps integer-valued inputs exact up to the
// final division, so equal-weight scores match the unweighted index bit for
// bit. A clean scope is pinned to 100 because `100 × t / t` can land one ulp
// off for non-integer totals.
fn percent(total: f64, invalid: f64) -> f64 {
    if invalid == 0.0 {
        return 100.0;
    }
    100.0 * (total - invalid) / total
}

/// Lookup from signal id to its record, after reconciliation against the
/// inventory.
struct RecordIndex<'a> {
    records: HashMap<&'a str, &'a SnapshotRecord>,
}

impl<'a> RecordIndex<'a> {
    fn build(inventory: &'a [SignalDescriptor], snapshot: &'a [SnapshotRecord]) -> Result<Self> {
        let known: BTreeSet<&str> = inventory.iter().map(|s| s.signal_id.as_str()).collect();
        let mut records = HashMap::with_capacity(snapshot.len());
        let mut unknown = Vec::new();
        for r in snapshot {
            r.validate()?;
            if !known.contains(r.signal_id.as_str()) {
                unknown.push(r.signal_id.clone());
                continue;
            }
            if records.insert(r.signal_id.as_str(), r).is_some() {
                return Err(Error::DuplicateRecord(r.signal_id.clone()));
            }
        }
        if !unknown.is_empty() {
            return Err(Error::Reconciliation { unknown });
        }
        Ok(RecordIndex { records })
    }

    /// Signals without a record carry no information and count as FAULTY.
    fn invalid(&self, signal_id: &str, policy: &InvalidityPolicy) -> bool {
        match self.records.get(signal_id) {
            Some(r) => is_invalid(r, policy),
            None => policy.tag_is_invalid(ValidityTag::Faulty),
        }
    }
}

fn score_group<'s>(
    scope: &str,
    signals: impl IntoIterator<Item = &'s SignalDescriptor>,
    index: &RecordIndex<'_>,
    tables: &WeightTables,
    policy: &InvalidityPolicy,
) -> Result<ObservabilityScore> {
    let mut total_raw = 0u64;
    let mut invalid_raw = 0u64;
    let mut total_weighted = 0.0;
    let mut invalid_weighted = 0.0;
    for s in signals {
        let invalid = index.invalid(&s.signal_id, policy);
        total_raw += 1;
        if invalid {
            invalid_raw += 1;
        }
        if s.weighted_scope {
            let mut w = signal_weight(s, tables)?;
            if s.in_instruction {
                w *= INSTRUCTION_MULTIPLIER;
            }
            total_weighted += w;
            if invalid {
                invalid_weighted += w;
            }
        }
    }
    if total_raw == 0 {
        return Err(Error::UndefinedScore {
            scope: scope.to_string(),
            reason: "no signals".into(),
        });
    }
    if total_weighted <= 0.0 {
        return Err(Error::UndefinedScore {
            scope: scope.to_string(),
            reason: "no signals in weighted scope".into(),
        });
    }
    Ok(ObservabilityScore {
        scope: scope.to_string(),
        total_raw,
        invalid_raw,
        unweighted: percent(total_raw as f64, invalid_raw as f64),
        total_weighted,
        invalid_weighted,
        weighted: percent(total_weighted, invalid_weighted),
    })
}

/// Scores a whole inventory as one scope.
pub fn weighted_observability(
    inventory: &[SignalDescriptor],
    snapshot: &[SnapshotRecord],
    tables: &WeightTables,
    policy: &InvalidityPolicy,
) -> Result<ObservabilityScore> {
    let index = RecordIndex::build(inventory, snapshot)?;
    score_group(NETWORK_SCOPE, inventory, &index, tables, policy)
}

/// Descending weighted score, then ascending scope.
pub fn rank_by_weighted(scores: &mut [ObservabilityScore]) {
    scores.sort_by(|a, b| b.weighted.total_cmp(&a.weighted).then_with(|| a.scope.cmp(&b.scope)));
}

/// Descending unweighted score, then ascending scope.
pub fn rank_by_unweighted(scores: &mut [ObservabilityScore]) {
    scores.sort_by(|a, b| {
        b.unweighted
            .total_cmp(&a.unweighted)
            .then_with(|| a.scope.cmp(&b.scope))
    });
}

fn score_grouped<K: Ord>(
    inventory: &[SignalDescriptor],
    snapshot: &[SnapshotRecord],
    tables: &WeightTables,
    policy: &InvalidityPolicy,
    key: impl Fn(&SignalDescriptor) -> K,
    label: impl Fn(&K) -> String,
) -> Result<Vec<ObservabilityScore>> {
    let index = RecordIndex::build(inventory, snapshot)?;
    let mut groups: BTreeMap<K, Vec<&SignalDescriptor>> = BTreeMap::new();
    for s in inventory {
        groups.entry(key(s)).or_default().push(s);
    }
    let mut scores = groups
        .iter()
        .map(|(k, signals)| score_group(&label(k), signals.iter().copied(), &index, tables, policy))
        .collect::<Result<Vec<_>>>()?;
    rank_by_weighted(&mut scores);
    Ok(scores)
}

/// One score per area, ranked by weighted score.
pub fn score_by_area(
    inventory: &[SignalDescriptor],
    snapshot: &[SnapshotRecord],
    tables: &WeightTables,
    policy: &InvalidityPolicy,
) -> Result<Vec<ObservabilityScore>> {
    score_grouped(inventory, snapshot, tables, policy, |s| s.area.clone(), |a| a.clone())
}

/// One score per station, scoped `area/station`, ranked by weighted score.
pub fn score_by_station(
    inventory: &[SignalDescriptor],
    snapshot: &[SnapshotRecord],
    tables: &WeightTables,
    policy: &InvalidityPolicy,
) -> Result<Vec<ObservabilityScore>> {
    score_grouped(
        inventory,
        snapshot,
        tables,
        policy,
        |s| (s.area.clone(), s.station.clone()),
        |(a, st)| format!("{a}/{st}"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Movement {
    Improved,
    Unchanged,
    Declined,
}

impl Movement {
    pub fn classify(delta: f64) -> Self {
        if delta.abs() < UNCHANGED_BAND {
            Movement::Unchanged
        } else if delta > 0.0 {
            Movement::Improved
        } else {
            Movement::Declined
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexDelta {
    pub before: f64,
    pub after: f64,
    pub delta: f64,
    pub movement: Movement,
}

impl IndexDelta {
    fn new(before: f64, after: f64) -> Self {
        let delta = after - before;
        IndexDelta {
            before,
            after,
            delta,
            movement: Movement::classify(delta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaComparison {
    pub area: String,
    pub unweighted: IndexDelta,
    pub weighted: IndexDelta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Sorted by area.
    pub areas: Vec<AreaComparison>,
}

impl ComparisonReport {
    pub fn get(&self, area: &str) -> Option<&AreaComparison> {
        self.areas.iter().find(|a| a.area == area)
    }
}

fn by_scope(scores: &[ObservabilityScore], side: &str) -> Result<BTreeMap<String, ObservabilityScore>> {
    let mut out = BTreeMap::new();
    for s in scores {
        if out.insert(s.scope.clone(), s.clone()).is_some() {
            return Err(Error::Validation(format!(
                "area `{}` appears twice in the {side} scores",
                s.scope
            )));
        }
    }
    Ok(out)
}

/// Per-area movement between two score sets over the same areas.
pub fn compare_snapshots(
    before: &[ObservabilityScore],
    after: &[ObservabilityScore],
) -> Result<ComparisonReport> {
    let before = by_scope(before, "before")?;
    let after = by_scope(after, "after")?;
    let only_before: Vec<String> = before.keys().filter(|k| !after.contains_key(*k)).cloned().collect();
    let only_after: Vec<String> = after.keys().filter(|k| !before.contains_key(*k)).cloned().collect();
    if !only_before.is_empty() || !only_after.is_empty() {
        return Err(Error::AreaMismatch {
            only_before,
            only_after,
        });
    }
    let areas = before
        .iter()
        .map(|(area, b)| {
            let a = &after[area];
            AreaComparison {
                area: area.clone(),
                unweighted: IndexDelta::new(b.unweighted, a.unweighted),
                weighted: IndexDelta::new(b.weighted, a.weighted),
            }
        })
        .collect();
    Ok(ComparisonReport { areas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{ComponentKind, QuantityKind};

    fn ts() -> DateTime<Utc> {
        "2026-01-15T00:00:00Z".parse().unwrap()
    }

    fn rec(id: &str, tag: ValidityTag) -> SnapshotRecord {
        SnapshotRecord::new(id, tag, false, ts()).unwrap()
    }

    fn two_signal(kv_in_instruction: bool) -> (Vec<SignalDescriptor>, Vec<SnapshotRecord>) {
        let inv = vec![
            SignalDescriptor::new("g1", "X", "S1", ComponentKind::Generator, QuantityKind::Mw).unwrap(),
            SignalDescriptor::new("l1", "X", "S1", ComponentKind::TransmissionLine, QuantityKind::Kv)
                .unwrap()
                .in_instruction(kv_in_instruction),
        ];
        let snap = vec![rec("g1", ValidityTag::Valid), rec("l1", ValidityTag::Invalid)];
        (inv, snap)
    }

    #[test]
    fn invalidity_examples() {
        let p = InvalidityPolicy::default();
        assert!(is_invalid(&rec("a", ValidityTag::Faulty), &p));
        assert!(!is_invalid(&rec("a", ValidityTag::Valid), &p));
        assert!(!is_invalid(&rec("a", ValidityTag::Manual), &p));
        let flagged = SnapshotRecord::new("a", ValidityTag::Valid, true, ts()).unwrap();
        assert!(is_invalid(&flagged, &p));
        let lenient = InvalidityPolicy {
            count_se_flags: false,
            ..Default::default()
        };
        assert!(!is_invalid(&flagged, &lenient));
    }

    #[test]
    fn se_flag_requires_valid_tag() {
        assert!(SnapshotRecord::new("a", ValidityTag::Faulty, true, ts()).is_err());
    }

    #[test]
    fn policy_json() {
        let p = InvalidityPolicy::from_json(r#"{"invalid_tags":["F","M"],"count_se_flags":false}"#).unwrap();
        assert!(p.invalid_tags.contains(&ValidityTag::Manual));
        assert!(!p.invalid_tags.contains(&ValidityTag::Invalid));
        assert_eq!(
            serde_json::to_string(&InvalidityPolicy::default()).unwrap(),
            r#"{"invalid_tags":["F","N","I"],"count_se_flags":true}"#
        );
    }

    #[test]
    fn unweighted_examples() {
        assert_eq!(unweighted_observability(100, 2).unwrap(), 98.0);
        assert_eq!(unweighted_observability(37, 0).unwrap(), 100.0);
        assert_eq!(unweighted_observability(37, 37).unwrap(), 0.0);
        assert!(matches!(unweighted_observability(0, 0), Err(Error::UndefinedScore { .. })));
        assert!(unweighted_observability(3, 4).is_err());
    }

    #[test]
    fn worked_two_signal_example() {
        let tables = WeightTables::reference();
        let (inv, snap) = two_signal(false);
        let s = weighted_observability(&inv, &snap, &tables, &InvalidityPolicy::default()).unwrap();
        // independent arithmetic: 54.57*51.5 + 14.53*6.27, invalid 14.53*6.27
        let gen = 54.57 * 51.5;
        let kv = 14.53 * 6.27;
        assert!((s.total_weighted - (gen + kv)).abs() < 1e-9);
        assert!((s.total_weighted - 2901.4581).abs() < 1e-9);
        assert!((s.invalid_weighted - 91.1031).abs() < 1e-9);
        assert!((s.weighted - 100.0 * gen / (gen + kv)).abs() < 1e-12);
        assert_eq!(format!("{:.2}", s.weighted), "96.86");
        assert_eq!(s.unweighted, 50.0);

        let (inv, snap) = two_signal(true);
        let s = weighted_observability(&inv, &snap, &tables, &InvalidityPolicy::default()).unwrap();
        assert!((s.total_weighted - 2992.5612).abs() < 1e-9);
        assert_eq!(format!("{:.2}", s.weighted), "93.91");
    }

    #[test]
    fn all_valid_is_hundred() {
        let (inv, mut snap) = two_signal(true);
        snap[1].tag = ValidityTag::Valid;
        let s = weighted_observability(&inv, &snap, &WeightTables::reference(), &Default::default()).unwrap();
        assert_eq!(s.weighted, 100.0);
        assert_eq!(s.unweighted, 100.0);
    }

    #[test]
    fn out_of_scope_only_affects_weighted() {
        let (mut inv, snap) = two_signal(false);
        inv[1].weighted_scope = false;
        let s = weighted_observability(&inv, &snap, &WeightTables::reference(), &Default::default()).unwrap();
        assert_eq!(s.unweighted, 50.0);
        assert_eq!(s.weighted, 100.0);
        assert_eq!(s.invalid_raw, 1);

        inv[0].weighted_scope = false;
        let err = weighted_observability(&inv, &snap, &WeightTables::reference(), &Default::default()).unwrap_err();
        assert!(matches!(err, Error::UndefinedScore { .. }));
    }

    #[test]
    fn unknown_and_duplicate_records() {
        let (inv, mut snap) = two_signal(false);
        snap.push(rec("ghost", ValidityTag::Valid));
        let err = weighted_observability(&inv, &snap, &WeightTables::reference(), &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Reconciliation { ref unknown } if unknown == &["ghost".to_string()]));

        let (inv, mut snap) = two_signal(false);
        snap.push(rec("g1", ValidityTag::Valid));
        assert!(matches!(
            weighted_observability(&inv, &snap, &WeightTables::reference(), &Default::default()),
            Err(Error::DuplicateRecord(_))
        ));
    }

    #[test]
    fn missing_record_counts_as_faulty() {
        let (inv, mut snap) = two_signal(false);
        snap.truncate(1);
        let s = weighted_observability(&inv, &snap, &WeightTables::reference(), &Default::default()).unwrap();
        assert_eq!(s.invalid_raw, 1);
    }

    #[test]
    fn empty_inventory_undefined() {
        let err = weighted_observability(&[], &[], &WeightTables::reference(), &Default::default()).unwrap_err();
        assert!(matches!(err, Error::UndefinedScore { .. }));
    }

    #[test]
    fn areas_ranked_and_tied_by_name() {
        let mut inv = Vec::new();
        let mut snap = Vec::new();
        for area in ["B", "A", "C"] {
            for k in 0..2 {
                let id = format!("{area}{k}");
                inv.push(SignalDescriptor::new(&id, area, "S", ComponentKind::Busbar, QuantityKind::Kv).unwrap());
                let tag = if area == "C" && k == 0 { ValidityTag::Faulty } else { ValidityTag::Valid };
                snap.push(rec(&id, tag));
            }
        }
        let scores = score_by_area(&inv, &snap, &WeightTables::reference(), &Default::default()).unwrap();
        let order: Vec<&str> = scores.iter().map(|s| s.scope.as_str()).collect();
        assert_eq!(order, ["A", "B", "C"]);
        assert_eq!(scores[2].weighted, 50.0);
    }

    #[test]
    fn stations_scoped_by_area() {
        let (inv, snap) = two_signal(false);
        let scores = score_by_station(&inv, &snap, &WeightTables::reference(), &Default::default()).unwrap();
        assert_eq!(scores.len(), 1);
        assert_eq!(scores[0].scope, "X/S1");
    }

    fn score(scope: &str, unweighted: f64, weighted: f64) -> ObservabilityScore {
        ObservabilityScore {
            scope: scope.into(),
            total_raw: 100,
            invalid_raw: 0,
            unweighted,
            total_weighted: 1.0,
            invalid_weighted: 0.0,
            weighted,
        }
    }

    #[test]
    fn comparison_classification() {
        let before = vec![score("J", 90.0, 80.0), score("B", 98.0, 98.0)];
        let after = vec![score("B", 97.0, 97.8), score("J", 90.0, 84.0)];
        let report = compare_snapshots(&before, &after).unwrap();
        let j = report.get("J").unwrap();
        assert_eq!(j.weighted.delta, 4.0);
        assert_eq!(j.weighted.movement, Movement::Improved);
        assert_eq!(j.unweighted.movement, Movement::Unchanged);
        let b = report.get("B").unwrap();
        assert_eq!(b.unweighted.movement, Movement::Declined);
        assert_eq!(b.weighted.movement, Movement::Unchanged);
        assert_eq!(report.areas[0].area, "B");
    }

    #[test]
    fn identical_inputs_unchanged() {
        let s = vec![score("A", 99.0, 97.0), score("B", 98.0, 98.0)];
        let report = compare_snapshots(&s, &s).unwrap();
        for a in &report.areas {
            assert_eq!(a.weighted.delta, 0.0);
            assert_eq!(a.unweighted.delta, 0.0);
            assert_eq!(a.weighted.movement, Movement::Unchanged);
        }
    }

    #[test]
    fn comparison_area_mismatch() {
        let before = vec![score("A", 99.0, 97.0)];
        let after = vec![score("A", 99.0, 97.0), score("B", 98.0, 98.0)];
        match compare_snapshots(&before, &after).unwrap_err() {
            Error::AreaMismatch { only_before, only_after } => {
                assert!(only_before.is_empty());
                assert_eq!(only_after, vec!["B".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
