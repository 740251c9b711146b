//! Derive M and N tables from the three bundled reference questionnaires and
//! set them against the bundled reference tables.
//!
//! Each expert answers 11 comparison matrices: quantities within each of the
//! six components (M) and components within each of the five quantities (N).
//!
//! ```text
//! cargo run --example derive_weights
//! ```

use std::path::PathBuf;

use gridobs::ahp::{build_weight_tables, AggregationMode, DerivationOptions, Questionnaire, WeightTables};
use gridobs::taxonomy::ComponentKind;

fn main() -> gridobs::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/questionnaires");
    let experts = (1..=3)
        .map(|k| Questionnaire::load(dir.join(format!("reference_expert_{k}.json"))))
        .collect::<gridobs::Result<Vec<_>>>()?;

    let derived = build_weight_tables(&experts, &DerivationOptions::default())?;
    let bundled = WeightTables::reference();

    println!("{:<26} {:<7} {:>8} {:>8} {:>7}", "M: component", "qty", "derived", "bundled", "diff");
    let mut worst: f64 = 0.0;
    for c in ComponentKind::ALL {
        for &q in c.quantities() {
            let (d, p) = (derived.tables.m(c, q)?, bundled.m(c, q)?);
            worst = worst.max((d - p).abs());
            println!("{:<26} {:<7} {:>8.2} {:>8.2} {:>+7.2}", c.to_string(), q.to_string(), d, p, d - p);
        }
    }
    for (c, q, _) in bundled.pair_weights() {
        worst = worst.max((derived.tables.n(q, c)? - bundled.n(q, c)?).abs());
    }
    println!("\nlargest deviation over both tables: {worst:.3}");

    let flagged = derived
        .consistency
        .iter()
        .filter(|c| !c.report.acceptable)
        .count();
    println!(
        "{} expert matrices checked, {} above CR 0.10, {} warnings",
        derived.consistency.len(),
        flagged,
        derived.warnings.len()
    );

    // Pooling judgments first instead of averaging priorities.
    let pooled = build_weight_tables(
        &experts,
        &DerivationOptions {
            aggregation: AggregationMode::Judgments,
            ..DerivationOptions::default()
        },
    )?;
    let bb = |t: &WeightTables| t.pair_weight(ComponentKind::Busbar, gridobs::taxonomy::QuantityKind::Kv);
    println!(
        "BUSBAR/KV weight: averaged priorities {:.1}, pooled judgments {:.1}",
        bb(&derived.tables)?,
        bb(&pooled.tables)?
    );
    Ok(())
}
