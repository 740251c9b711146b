//! Seeded synthetic inventories and snapshots.

use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::inventory::write_inventory;
use super::snapshot::write_snapshot;
use crate::error::{Error, Result};
use crate::observability::SnapshotRecord;
use crate::taxonomy::{applicable_pairs, SignalDescriptor, ValidityTag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureConfig {
    pub seed: u64,
    pub areas: usize,
    pub stations_per_area: usize,
    pub signals_per_station: usize,
    /// Probability that a signal carries incorrect data.
    pub fault_rate: f64,
    /// Probability that a signal is named in an operating instruction.
    pub instruction_rate: f64,
    /// Probability that a signal is excluded from the weighted index.
    #[serde(default)]
    pub out_of_scope_rate: f64,
}

impl FixtureConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: FixtureConfig =
            serde_json::from_str(s).map_err(|e| Error::Validation(format!("fixture config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.areas == 0 || self.stations_per_area == 0 || self.signals_per_station == 0 {
            return Err(Error::Validation(
                "areas, stations_per_area and signals_per_station must be at least 1".into(),
            ));
        }
        for (name, p) in [
            ("fault_rate", self.fault_rate),
            ("instruction_rate", self.instruction_rate),
            ("out_of_scope_rate", self.out_of_scope_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Validation(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub inventory: Vec<SignalDescriptor>,
    pub snapshot: Vec<SnapshotRecord>,
}

/// `A`..`Z`, then `AA`, `AB`, ...
pub fn area_label(mut index: usize) -> String {
    let mut label = Vec::new();
    loop {
        label.push(b'A' + (index % 26) as u8);
        if index < 26 {
            break;
        }
        index = index / 26 - 1;
    }
    label.reverse();
    String::from_utf8(label).expect("ascii")
}

pub fn default_epoch() -> DateTime<Utc> {
    "2026-01-01T00:00:00Z".parse().expect("valid timestamp")
}

const INCORRECT: [(ValidityTag, bool); 4] = [
    (ValidityTag::Faulty, false),
    (ValidityTag::NonCurrent, false),
    (ValidityTag::Invalid, false),
    (ValidityTag::Valid, true),
];

fn draw_record(
    rng: &mut ChaCha8Rng,
    signal_id: &str,
    fault_rate: f64,
    taken_at: DateTime<Utc>,
) -> SnapshotRecord {
    let (tag, se_flagged) = if rng.gen_bool(fault_rate) {
        *INCORRECT.choose(rng).expect("non-empty")
    } else if rng.gen_bool(0.02) {
        (ValidityTag::Manual, false)
    } else {
        (ValidityTag::Valid, false)
    };
    SnapshotRecord {
        signal_id: signal_id.to_string(),
        tag,
        se_flagged,
        timestamp: taken_at,
    }
}

/// Generates an inventory and one snapshot from `config`. Identical configs
/// give identical fixtures.
pub fn generate(config: &FixtureConfig) -> Result<Fixture> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pairs = applicable_pairs();
    let taken_at = default_epoch();
    let mut inventory = Vec::new();
    let mut snapshot = Vec::new();
    for a in 0..config.areas {
        let area = area_label(a);
        for s in 1..=config.stations_per_area {
            let station = format!("{area}-S{s:02}");
            for k in 1..=config.signals_per_station {
                let (component, quantity) = *pairs.choose(&mut rng).expect("non-empty");
                let signal_id = format!("{station}-{k:04}");
                let descriptor = SignalDescriptor {
                    signal_id: signal_id.clone(),
                    area: area.clone(),
                    station: station.clone(),
                    component,
                    quantity,
                    in_instruction: rng.gen_bool(config.instruction_rate),
                    weighted_scope: !rng.gen_bool(config.out_of_scope_rate),
                };
                snapshot.push(draw_record(&mut rng, &signal_id, config.fault_rate, taken_at));
                inventory.push(descriptor);
            }
        }
    }
    Ok(Fixture { inventory, snapshot })
}

impl Fixture {
    /// A fresh snapshot of the same inventory, `days` after the original.
    pub fn resample(&self, seed: u64, fault_rate: f64, days: i64) -> Result<Vec<SnapshotRecord>> {
        if !(0.0..=1.0).contains(&fault_rate) {
            return Err(Error::Validation(format!("fault_rate = {fault_rate} is not in [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taken_at = default_epoch() + Duration::days(days);
        Ok(self
            .inventory
            .iter()
            .map(|s| draw_record(&mut rng, &s.signal_id, fault_rate, taken_at))
            .collect())
    }

    /// Writes `inventory.csv` and `snapshot.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_inventory(dir.join("inventory.csv"), &self.inventory)?;
        write_snapshot(dir.join("snapshot.csv"), &self.snapshot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(seed: u64) -> FixtureConfig {
        FixtureConfig {
            seed,
            areas: 3,
            stations_per_area: 2,
            signals_per_station: 10,
            fault_rate: 0.2,
            instruction_rate: 0.1,
            out_of_scope_rate: 0.0,
        }
    }

    #[test]
    fn labels() {
        assert_eq!(area_label(0), "A");
        assert_eq!(area_label(15), "P");
        assert_eq!(area_label(25), "Z");
        assert_eq!(area_label(26), "AA");
        assert_eq!(area_label(27), "AB");
        assert_eq!(area_label(26 + 26 * 26), "AAA");
    }

    #[test]
    fn deterministic_and_valid() {
        let a = generate(&config(7)).unwrap();
        let b = generate(&config(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate(&config(8)).unwrap());
        assert_eq!(a.inventory.len(), 60);
        for s in &a.inventory {
            s.validate().unwrap();
        }
        for r in &a.snapshot {
            r.validate().unwrap();
        }
    }

    #[test]
    fn config_json() {
        let c = FixtureConfig::from_json(
            r#"{"seed":1,"areas":16,"stations_per_area":5,"signals_per_station":40,"fault_rate":0.05,"instruction_rate":0.1}"#,
        )
        .unwrap();
        assert_eq!(c.areas, 16);
        assert_eq!(c.out_of_scope_rate, 0.0);
        assert!(FixtureConfig::from_json(
            r#"{"seed":1,"areas":0,"stations_per_area":5,"signals_per_station":40,"fault_rate":0.05,"instruction_rate":0.1}"#
        )
        .is_err());
        assert!(FixtureConfig::from_json(
            r#"{"seed":1,"areas":1,"stations_per_area":5,"signals_per_station":40,"fault_rate":1.5,"instruction_rate":0.1}"#
        )
        .is_err());
    }
}
