//! Score a seeded synthetic network area by area and print the report in
//! all three formats.
//!
//! ```text
//! cargo run --example score_network -- 42
//! ```

use gridobs::ahp::WeightTables;
use gridobs::ingest::{generate, FixtureConfig};
use gridobs::observability::{score_by_area, weighted_observability, InvalidityPolicy};
use gridobs::report::{OutputFormat, ReportBody, ReportDocument, ScopeKind, ScoresBody};

fn main() -> gridobs::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let config = FixtureConfig {
        seed,
        areas: 10,
        stations_per_area: 12,
        signals_per_station: 30,
        fault_rate: 0.04,
        instruction_rate: 0.08,
        out_of_scope_rate: 0.01,
    };
    let fixture = generate(&config)?;
    let tables = WeightTables::reference();
    let policy = InvalidityPolicy::default();

    let areas = score_by_area(&fixture.inventory, &fixture.snapshot, &tables, &policy)?;
    let network = weighted_observability(&fixture.inventory, &fixture.snapshot, &tables, &policy)?;
    let taken_at = fixture.snapshot[0].timestamp;
    let doc = ReportDocument::new(
        taken_at,
        ReportBody::Scores(ScoresBody::new(ScopeKind::Area, Some(format!("seed-{seed}")), Some(&network), &areas)),
    );

    println!("{}", doc.render(OutputFormat::Text));
    println!("--- csv ---\n{}", doc.render(OutputFormat::Csv));
    let json = doc.render(OutputFormat::Json);
    println!("--- json: {} bytes, first lines ---", json.len());
    for line in json.lines().take(8) {
        println!("{line}");
    }
    Ok(())
}
