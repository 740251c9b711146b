// Load an inventory and a snapshot from CSV, including the ways loading
// can go wrong.
//
//     cargo run --example load_files

use gridobs::ingest::{load_inventory, load_snapshot, parse_inventory, MissingSignalPolicy};
use gridobs::taxonomy::ValidityTag;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).map(|_| p)
    };

    let inventory_path = write(
        "inventory.csv",
        "signal_id,area,station,component,quantity,in_instruction,weighted_scope\n\
         G1-MW,North,N-01,GENERATOR,MW,1,1\n\
         G1-MVAR,North,N-01,GENERATOR,MVAR,0,1\n\
         BB1-KV,North,N-01,BUSBAR,KV,0,1\n\
         CB7,North,N-01,TRANSMISSION_LINE,STATUS,0,0\n",
    )?;
    let inventory = load_inventory(&inventory_path)?;
    println!("{} signals loaded from {}", inventory.len(), inventory_path.display());

    // BB1-KV has no record in this snapshot.
    let snapshot_path = write(
        "2026-05-01.csv",
        "signal_id,tag,se_flagged,timestamp\n\
         G1-MW,V,0,2026-05-01T00:00:00Z\n\
         G1-MVAR,V,1,2026-05-01T00:00:00Z\n\
         CB7,M,0,2026-05-01T02:30:00+02:30\n",
    )?;
    let set = load_snapshot(&snapshot_path, &inventory, MissingSignalPolicy::Faulty)?;
    println!("snapshot `{}` taken at {}", set.snapshot_id, set.taken_at);
    for r in &set.records {
        let note = if r.tag == ValidityTag::Faulty { "  (no record, counted as faulty)" } else { "" };
        println!("  {:<8} {} se={}{note}", r.signal_id, r.tag, r.se_flagged);
    }
    if let Err(e) = load_snapshot(&snapshot_path, &inventory, MissingSignalPolicy::Error) {
        println!("with missing records treated as errors: {e}");
    }

    let orphan = write("orphan.csv", "signal_id,tag,se_flagged,timestamp\nXX9,V,0,2026-05-01T00:00:00Z\n")?;
    println!("unknown id: {}", load_snapshot(&orphan, &inventory, MissingSignalPolicy::Faulty).unwrap_err());

    let bad = "signal_id,area,station,component,quantity,in_instruction,weighted_scope\nB2,North,N-02,BUSBAR,TAP,0,1\n";
    println!("bad pair: {}", parse_inventory("inline.csv".as_ref(), bad).unwrap_err());
    Ok(())
}
