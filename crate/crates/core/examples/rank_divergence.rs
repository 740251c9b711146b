// Two areas with the same share of bad signals can rank very differently
// once each signal counts by its importance. Area C lost three
// transmission-line kV readings, the least important signal there is; area
// D lost a busbar kV and two generator readings.
//
//     cargo run --example rank_divergence

use std::path::PathBuf;

use gridobs::ahp::{signal_weight, WeightTables};
use gridobs::ingest::{load_inventory, load_snapshot, MissingSignalPolicy};
use gridobs::observability::{is_invalid, score_by_area, InvalidityPolicy};
use gridobs::report::{ScopeKind, ScoresBody};

fn main() -> gridobs::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixtures/rank_divergence");
    let inventory = load_inventory(dir.join("inventory.csv"))?;
    let snapshot = load_snapshot(dir.join("snapshot.csv"), &inventory, MissingSignalPolicy::Faulty)?;
    let tables = WeightTables::reference();
    let policy = InvalidityPolicy::default();

    for (s, r) in inventory.signals.iter().zip(&snapshot.records) {
        if is_invalid(r, &policy) {
            println!("{}  {:<18} {:<6} tag {}  weight {:>8.2}", s.area, s.component.to_string(), s.quantity.to_string(), r.tag, signal_weight(s, &tables)?);
        }
    }

    let scores = score_by_area(&inventory.signals, &snapshot.records, &tables, &policy)?;
    let body = ScoresBody::new(ScopeKind::Area, Some(snapshot.snapshot_id), None, &scores);
    for tie in &body.unweighted_ties {
        println!("\ntied at {}% unweighted: {}", tie.unweighted_percent, tie.scopes.join(", "));
        for (scope, w) in tie.scopes.iter().zip(&tie.weighted) {
            println!("  {scope}: {w:.2}% weighted");
        }
    }
    for (plain, weighted) in body.without_weighting.iter().zip(&body.with_weighting) {
        println!("rank {} {} | rank {} {}", plain.rank, plain.scope, weighted.rank, weighted.scope);
    }
    Ok(())
}
