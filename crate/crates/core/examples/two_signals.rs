//! The smallest interesting case: one valid generator MW reading and one
//! invalid transmission-line kV reading.
//!
//! Unweighted, half the signals are bad. Weighted, the bad one is the least
//! important signal in the network, so the score stays high. Naming the kV
//! signal in an operating instruction doubles its weight.

use gridobs::ahp::WeightTables;
use gridobs::observability::{weighted_observability, InvalidityPolicy, SnapshotRecord};
use gridobs::taxonomy::{ComponentKind, QuantityKind, SignalDescriptor, ValidityTag};

fn main() -> gridobs::Result<()> {
    let at = "2026-01-15T00:00:00Z".parse().expect("timestamp");
    let tables = WeightTables::reference();
    let policy = InvalidityPolicy::default();

    let generator = SignalDescriptor::new("g1", "X", "S1", ComponentKind::Generator, QuantityKind::Mw)?;
    let line = SignalDescriptor::new("l1", "X", "S1", ComponentKind::TransmissionLine, QuantityKind::Kv)?;
    let snapshot = [
        SnapshotRecord::new("g1", ValidityTag::Valid, false, at)?,
        SnapshotRecord::new("l1", ValidityTag::Invalid, false, at)?,
    ];

    for instructed in [false, true] {
        let inventory = [generator.clone(), line.clone().in_instruction(instructed)];
        let s = weighted_observability(&inventory, &snapshot, &tables, &policy)?;
        println!(
            "kV in instruction: {:<5}  AD = {:>9.4}  OB = {:>8.4}  unweighted {:>6.2}%  weighted {:>6.2}%",
            instructed, s.total_weighted, s.invalid_weighted, s.unweighted, s.weighted
        );
    }

    // A record that is nominally valid but rejected by state estimation
    // counts as bad unless the policy says otherwise.
    let flagged = [
        SnapshotRecord::new("g1", ValidityTag::Valid, true, at)?,
        SnapshotRecord::new("l1", ValidityTag::Valid, false, at)?,
    ];
    let inventory = [generator, line];
    let strict = weighted_observability(&inventory, &flagged, &tables, &policy)?;
    let lenient = InvalidityPolicy {
        count_se_flags: false,
        ..InvalidityPolicy::default()
    };
    let relaxed = weighted_observability(&inventory, &flagged, &tables, &lenient)?;
    println!("generator flagged by state estimation: {:.2}% by default, {:.2}% when flags are ignored", strict.weighted, relaxed.weighted);
    Ok(())
}
