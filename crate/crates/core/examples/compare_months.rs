//! Track a network over three months in a history store and compare the
//! first month with the last.
//!
//! The fault rate drops from 6% to 2%, so most areas should improve. Areas
//! that move less than half a point either way are reported as unchanged.

use gridobs::ahp::WeightTables;
use gridobs::ingest::{generate, FixtureConfig, HistoryStore};
use gridobs::observability::{compare_snapshots, score_by_area, InvalidityPolicy, Movement};
use gridobs::report::{ComparisonBody, OutputFormat, ReportBody, ReportDocument};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixture = generate(&FixtureConfig {
        seed: 2026,
        areas: 8,
        stations_per_area: 6,
        signals_per_station: 40,
        fault_rate: 0.06,
        instruction_rate: 0.1,
        out_of_scope_rate: 0.0,
    })?;
    let tables = WeightTables::reference();
    let policy = InvalidityPolicy::default();

    let dir = tempfile::tempdir()?;
    let mut store = HistoryStore::open(dir.path())?;
    let months = [("2026-01", 0.06, 0), ("2026-02", 0.04, 31), ("2026-03", 0.02, 59)];
    for (k, (id, rate, day)) in months.iter().enumerate() {
        let snapshot = if k == 0 {
            fixture.snapshot.clone()
        } else {
            fixture.resample(7 + k as u64, *rate, *day)?
        };
        let scores = score_by_area(&fixture.inventory, &snapshot, &tables, &policy)?;
        store.persist_scores(id, snapshot[0].timestamp, &scores)?;
    }
    for e in store.entries() {
        println!("stored {} taken {}", e.snapshot_id, e.taken_at);
    }

    let first = store.load("2026-01")?;
    let last = store.load("2026-03")?;
    let report = compare_snapshots(&first.scores, &last.scores)?;
    let improved = report.areas.iter().filter(|a| a.weighted.movement == Movement::Improved).count();
    println!("{improved} of {} areas improved on the weighted index\n", report.areas.len());

    let doc = ReportDocument::new(last.taken_at, ReportBody::Comparison(ComparisonBody::new("2026-01", "2026-03", &report)));
    print!("{}", doc.render(OutputFormat::Text));
    Ok(())
}
