mod common;

use std::path::Path;

use chrono::{DateTime, TimeZone, Utc};
use proptest::prelude::*;

use gridobs::ahp::{Questionnaire, WeightTables};
use gridobs::ingest::{
    generate, inventory_to_csv, load_inventory, load_snapshot, parse_inventory, parse_snapshot_records,
    snapshot_to_csv, FixtureConfig, HistoryStore, Inventory, MissingSignalPolicy,
};
use gridobs::observability::{ObservabilityScore, SnapshotRecord};
use gridobs::taxonomy::{applicable_pairs, SignalDescriptor, ValidityTag};
use gridobs::Error;

fn descriptor() -> impl Strategy<Value = SignalDescriptor> {
    let label = "[A-Za-z0-9_\"-]([A-Za-z0-9 ,\"-]{0,8}[A-Za-z0-9])?";
    ("[A-Za-z0-9_./-]{1,12}", "[A-Z]{1,3}", label, 0usize..20, any::<bool>(), any::<bool>())
        .prop_map(|(id, area, station, pair, instr, scope)| {
            let (c, q) = applicable_pairs()[pair];
            SignalDescriptor::new(id, area, station, c, q)
                .unwrap()
                .in_instruction(instr)
                .weighted_scope(scope)
        })
}

fn record() -> impl Strategy<Value = SnapshotRecord> {
    (
        "[a-z0-9-]{1,10}",
        prop::sample::select(ValidityTag::ALL.to_vec()),
        any::<bool>(),
        0i64..4_000_000_000,
        0u32..1_000_000_000,
    )
        .prop_map(|(id, tag, se, secs, nanos)| {
            let t = Utc.timestamp_opt(secs, nanos).unwrap();
            SnapshotRecord::new(id, tag, se && tag == ValidityTag::Valid, t).unwrap()
        })
}

fn score() -> impl Strategy<Value = ObservabilityScore> {
    ("[A-Z]{1,4}", 1u64..10_000, 1e-3f64..1e7, 0.0f64..1.0).prop_map(|(scope, total, tw, share)| {
        let invalid = (total as f64 * share) as u64;
        ObservabilityScore {
            scope,
            total_raw: total,
            invalid_raw: invalid,
            unweighted: 100.0 * (total - invalid) as f64 / total as f64,
            total_weighted: tw,
            invalid_weighted: tw * share,
            weighted: 100.0 * (1.0 - share),
        }
    })
}

proptest! {
    #[test]
    fn inventory_csv_round_trips(signals in prop::collection::vec(descriptor(), 1..30)) {
        let mut seen = std::collections::HashSet::new();
        let signals: Vec<_> = signals.into_iter().filter(|s| seen.insert(s.signal_id.clone())).collect();
        let text = inventory_to_csv(&signals);
        let back = parse_inventory(Path::new("mem.csv"), &text).unwrap();
        prop_assert_eq!(back.signals, signals);
    }

    #[test]
    fn snapshot_csv_round_trips(records in prop::collection::vec(record(), 1..30)) {
        let text = snapshot_to_csv(&records);
        let back = parse_snapshot_records(Path::new("mem.csv"), &text).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn tables_json_round_trips(cells in prop::collection::vec(1e-6f64..1e6, 40)) {
        let (mut i, mut j) = (0, 20);
        let tables = WeightTables::from_fn(
            |_, _| { i += 1; cells[i - 1] },
            |_, _| { j += 1; cells[j - 1] },
        )
        .unwrap();
        let back = WeightTables::from_json(&tables.to_json_pretty()).unwrap();
        prop_assert_eq!(back, tables);
    }

    #[test]
    fn history_reads_back_bit_identical(scores in prop::collection::vec(score(), 1..8)) {
        let dir = tempfile::tempdir().unwrap();
        let at = Utc.with_ymd_and_hms(2026, 4, 1, 0, 0, 0).unwrap();
        let mut store = HistoryStore::open(dir.path()).unwrap();
        store.persist_scores("april", at, &scores).unwrap();
        let back = HistoryStore::open(dir.path()).unwrap().load("april").unwrap();
        prop_assert_eq!(back.scores.len(), scores.len());
        for (a, b) in back.scores.iter().zip(&scores) {
            prop_assert_eq!(a.weighted.to_bits(), b.weighted.to_bits());
            prop_assert_eq!(a.total_weighted.to_bits(), b.total_weighted.to_bits());
            prop_assert_eq!(a.invalid_weighted.to_bits(), b.invalid_weighted.to_bits());
            prop_assert_eq!(a.unweighted.to_bits(), b.unweighted.to_bits());
        }
    }
}

#[test]
fn bundled_tables_round_trip() {
    let bundled = WeightTables::reference();
    assert_eq!(WeightTables::from_json(&bundled.to_json_pretty()).unwrap(), bundled);
    let raw = std::fs::read_to_string(common::data_dir().join("tables_reference.json")).unwrap();
    assert_eq!(WeightTables::from_json(&raw).unwrap(), bundled);
}

#[test]
fn questionnaire_json_round_trips() {
    for k in 1..=3 {
        let path = common::data_dir().join(format!("questionnaires/reference_expert_{k}.json"));
        let q = Questionnaire::load(&path).unwrap();
        let back = Questionnaire::from_json(&serde_json::to_string_pretty(&q).unwrap()).unwrap();
        assert_eq!(back, q);
        assert!(q.missing_contexts().is_empty());
    }
}

fn inventory_of(ids: &[&str]) -> Inventory {
    let signals = ids
        .iter()
        .map(|id| {
            SignalDescriptor::new(
                *id,
                "A",
                "S",
                gridobs::taxonomy::ComponentKind::Generator,
                gridobs::taxonomy::QuantityKind::Mw,
            )
            .unwrap()
        })
        .collect();
    Inventory::from_signals(signals, "mem").unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn four_row_inventory_loads() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "inv.csv",
        "signal_id,area,station,component,quantity,in_instruction,weighted_scope\n\
         a,N,S1,GENERATOR,MW,0,1\n\
         b,N,S1,generator,mv,1,1\n\
         c,N,S1,BUSBAR,KV,0,1\n\
         d,N,S2,REACTOR_CAPACITOR,STATUS,0,0\n",
    );
    let inv = load_inventory(&p).unwrap();
    assert_eq!(inv.len(), 4);
    assert_eq!(inv.get("b").unwrap().quantity, gridobs::taxonomy::QuantityKind::Mvar);
    assert!(inv.get("b").unwrap().in_instruction);
    assert!(!inv.get("d").unwrap().weighted_scope);
}

#[test]
fn inventory_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let header = "signal_id,area,station,component,quantity,in_instruction,weighted_scope\n";
    let busbar_tap = write(dir.path(), "a.csv", &format!("{header}x,N,S,BUSBAR,TAP,0,1\n"));
    let err = load_inventory(&busbar_tap).unwrap_err();
    assert!(err.to_string().contains("applicability rule"), "{err}");

    let dup = write(dir.path(), "b.csv", &format!("{header}x,N,S,BUSBAR,KV,0,1\nx,N,S,BUSBAR,STATUS,0,1\n"));
    assert!(load_inventory(&dup).unwrap_err().to_string().contains('x'));

    let bad_flag = write(dir.path(), "c.csv", &format!("{header}x,N,S,BUSBAR,KV,yes,1\n"));
    assert!(matches!(load_inventory(&bad_flag).unwrap_err(), Error::Load { line: Some(2), .. }));

    let blank = write(dir.path(), "e.csv", &format!("{header}x,N, ,BUSBAR,KV,0,1\n"));
    assert!(load_inventory(&blank).unwrap_err().to_string().contains("station"));
    assert!(SignalDescriptor::new(" x", "N", "S", gridobs::taxonomy::ComponentKind::Busbar, gridobs::taxonomy::QuantityKind::Kv).is_err());

    let no_header = write(dir.path(), "d.csv", "x,N,S,BUSBAR,KV,0,1\n");
    assert!(load_inventory(&no_header).is_err());
}

#[test]
fn snapshot_reconciliation() {
    let dir = tempfile::tempdir().unwrap();
    let inv = inventory_of(&["a", "b", "c"]);
    let header = "signal_id,tag,se_flagged,timestamp\n";

    let partial = write(dir.path(), "p.csv", &format!("{header}a,V,0,2026-01-01T00:00:00Z\nc,M,0,2026-01-01T00:05:00+01:00\n"));
    let set = load_snapshot(&partial, &inv, MissingSignalPolicy::Faulty).unwrap();
    assert_eq!(set.snapshot_id, "p");
    let ids: Vec<_> = set.records.iter().map(|r| r.signal_id.as_str()).collect();
    assert_eq!(ids, ["a", "b", "c"]);
    assert_eq!(set.records[1].tag, ValidityTag::Faulty);
    assert_eq!(set.taken_at, Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap());
    assert!(load_snapshot(&partial, &inv, MissingSignalPolicy::Error).is_err());

    let orphan = write(dir.path(), "o.csv", &format!("{header}a,V,0,2026-01-01T00:00:00Z\nzz,V,0,2026-01-01T00:00:00Z\n"));
    let err = load_snapshot(&orphan, &inv, MissingSignalPolicy::Faulty).unwrap_err();
    assert!(err.to_string().contains("zz"), "{err}");

    let bad_tag = write(dir.path(), "t.csv", &format!("{header}a,Q,0,2026-01-01T00:00:00Z\n"));
    assert!(matches!(
        load_snapshot(&bad_tag, &inv, MissingSignalPolicy::Faulty).unwrap_err(),
        Error::Load { .. } | Error::Parse { .. }
    ));

    let empty = write(dir.path(), "e.csv", header);
    assert!(load_snapshot(&empty, &inv, MissingSignalPolicy::Faulty).is_err());
}

#[test]
fn history_ordering_and_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let mut store = HistoryStore::open(dir.path()).unwrap();
    let s = |scope: &str| ObservabilityScore {
        scope: scope.into(),
        total_raw: 10,
        invalid_raw: 1,
        unweighted: 90.0,
        total_weighted: 1000.0,
        invalid_weighted: 50.0,
        weighted: 95.0,
    };
    let march = Utc.with_ymd_and_hms(2026, 3, 31, 0, 0, 0).unwrap();
    let feb = Utc.with_ymd_and_hms(2026, 2, 28, 0, 0, 0).unwrap();
    store.persist_scores("march", march, &[s("A")]).unwrap();
    store.persist_scores("feb", feb, &[s("A")]).unwrap();
    let order: Vec<_> = store.entries().iter().map(|e| e.snapshot_id.as_str()).collect();
    assert_eq!(order, ["feb", "march"]);
    assert!(matches!(store.persist_scores("feb", feb, &[s("A")]), Err(Error::Conflict(_))));
    assert!(store.persist_scores("../escape", feb, &[s("A")]).is_err());
    assert_eq!(store.latest().unwrap().unwrap().snapshot_id, "march");

    let first = std::fs::read(dir.path().join("feb.json")).unwrap();
    let reopened = HistoryStore::open(dir.path()).unwrap();
    assert_eq!(reopened.entries(), store.entries());
    assert_eq!(reopened.load("feb").unwrap(), reopened.load("feb").unwrap());
    assert_eq!(std::fs::read(dir.path().join("feb.json")).unwrap(), first);
    assert!(reopened.load("april").is_err());
}

#[test]
fn fixtures_are_seeded() {
    let config = FixtureConfig {
        seed: 11,
        areas: 3,
        stations_per_area: 4,
        signals_per_station: 25,
        fault_rate: 0.1,
        instruction_rate: 0.1,
        out_of_scope_rate: 0.0,
    };
    let a = generate(&config).unwrap();
    assert_eq!(a, generate(&config).unwrap());
    assert_eq!(a.inventory.len(), 300);
    let other = generate(&FixtureConfig { seed: 12, ..config.clone() }).unwrap();
    assert_ne!(a.snapshot, other.snapshot);

    let dir = tempfile::tempdir().unwrap();
    a.write(dir.path()).unwrap();
    let inv = load_inventory(dir.path().join("inventory.csv")).unwrap();
    assert_eq!(inv.signals, a.inventory);
    let snap = load_snapshot(dir.path().join("snapshot.csv"), &inv, MissingSignalPolicy::Error).unwrap();
    assert_eq!(snap.records, a.snapshot);
}

#[test]
fn timestamps_keep_utc_designator() {
    let t: DateTime<Utc> = Utc.with_ymd_and_hms(2026, 1, 15, 0, 0, 0).unwrap();
    let text = snapshot_to_csv(&[SnapshotRecord::new("a", ValidityTag::Valid, true, t).unwrap()]);
    assert_eq!(text, "signal_id,tag,se_flagged,timestamp\na,V,1,2026-01-15T00:00:00Z\n");
}
