#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use gridobs::ingest::FixtureConfig;
use gridobs::observability::SnapshotRecord;
use gridobs::taxonomy::{SignalDescriptor, ValidityTag};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn fixture_dir(name: &str) -> PathBuf {
    data_dir().join("fixtures").join(name)
}

/// Raw M×N products keyed by component and quantity token, read straight
/// from a tables JSON document without going through `WeightTables`.
pub fn raw_products(json: &str) -> HashMap<(String, String), f64> {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    let mut out = HashMap::new();
    for (component, row) in v["m_table"].as_object().unwrap() {
        for (quantity, m) in row.as_object().unwrap() {
            let n = v["n_table"][quantity][component].as_f64().unwrap();
            out.insert((component.clone(), quantity.clone()), m.as_f64().unwrap() * n);
        }
    }
    out
}

pub fn reference_products() -> HashMap<(String, String), f64> {
    raw_products(&std::fs::read_to_string(data_dir().join("tables_reference.json")).unwrap())
}

#[derive(Debug, Default, Clone)]
pub struct OracleScore {
    pub total: u64,
    pub invalid: u64,
    pub weight_all: f64,
    pub weight_good: f64,
}

impl OracleScore {
    /// Unweighted index to 2 decimals, rounded half up in integer arithmetic.
    pub fn unweighted_2dp(&self) -> String {
        let scaled = 2 * 10_000 * (self.total - self.invalid) + self.total;
        let hundredths = scaled / (2 * self.total);
        format!("{}.{:02}", hundredths / 100, hundredths % 100)
    }

    /// Share of weight carried by usable signals.
    pub fn weighted(&self) -> f64 {
        self.weight_good / self.weight_all * 100.0
    }
}

/// Brute-force per-area scores under the default invalidity policy.
pub fn oracle_by_area(
    inventory: &[SignalDescriptor],
    snapshot: &[SnapshotRecord],
    products: &HashMap<(String, String), f64>,
) -> BTreeMap<String, OracleScore> {
    let mut tag_of: HashMap<&str, (ValidityTag, bool)> = HashMap::new();
    for r in snapshot {
        tag_of.insert(&r.signal_id, (r.tag, r.se_flagged));
    }
    let mut out: BTreeMap<String, OracleScore> = BTreeMap::new();
    for s in inventory {
        let bad = match tag_of.get(s.signal_id.as_str()) {
            None => true,
            Some((ValidityTag::Valid, se)) => *se,
            Some((ValidityTag::Manual, _)) => false,
            Some(_) => true,
        };
        let e = out.entry(s.area.clone()).or_default();
        e.total += 1;
        if bad {
            e.invalid += 1;
        }
        if s.weighted_scope {
            let key = (s.component.to_string(), s.quantity.to_string());
            let w = products[&key] * if s.in_instruction { 2.0 } else { 1.0 };
            e.weight_all += w;
            if !bad {
                e.weight_good += w;
            }
        }
    }
    out
}

/// The 100 seeded fixture shapes: 99 varied ones and the full
/// 16 areas × 50 stations × 40 signals.
pub fn fixture_configs() -> Vec<FixtureConfig> {
    let varied = (0..99usize).map(|k| {
        let stations_per_area = 1 + (k * 13) % 50;
        let signals_per_station = 1 + (k * 17) % 40;
        // tiny areas could lose every weighted signal
        let big = stations_per_area * signals_per_station >= 50;
        FixtureConfig {
            seed: 1000 + k as u64,
            areas: 1 + (k * 7) % 16,
            stations_per_area,
            signals_per_station,
            fault_rate: [0.0, 0.01, 0.03, 0.1, 0.3][k % 5],
            instruction_rate: [0.0, 0.05, 0.2][k % 3],
            out_of_scope_rate: if k % 4 == 3 && big { 0.1 } else { 0.0 },
        }
    });
    varied
        .chain(std::iter::once(FixtureConfig {
            seed: 4242,
            areas: 16,
            stations_per_area: 50,
            signals_per_station: 40,
            fault_rate: 0.05,
            instruction_rate: 0.1,
            out_of_scope_rate: 0.02,
        }))
        .collect()
}
