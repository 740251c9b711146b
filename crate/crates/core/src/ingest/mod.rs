//! File formats and persistence: inventory and snapshot CSV, the score
//! history store, and the synthetic fixture generator.

mod csv_rows;
pub mod fixture;
mod history;
mod inventory;
mod snapshot;

pub use fixture::{generate, Fixture, FixtureConfig};
pub use history::{HistoryEntry, HistoryStore, StoredScores};
pub use inventory::{
    inventory_to_csv, load_inventory, parse_inventory, write_inventory, Inventory, INVENTORY_COLUMNS,
};
pub use snapshot::{
    format_timestamp, load_snapshot, parse_snapshot_records, reconcile, snapshot_to_csv,
    write_snapshot, MissingSignalPolicy, SnapshotSet, SNAPSHOT_COLUMNS,
};
