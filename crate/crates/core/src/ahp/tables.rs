//! The two weight tables that combine into per-signal importance.
//!
//! `m_table[component][quantity]` ranks quantities within one component and
//! `n_table[quantity][component]` ranks components within one quantity. A
//! signal's weight is the product of its two cells.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taxonomy::{applicable_pairs, ComponentKind, QuantityKind, SignalDescriptor};

const REFERENCE_TABLES_JSON: &str = include_str!("../../data/tables_reference.json");

/// Column-sum tolerance for the hand-transcribed reference tables, whose
/// published values carry rounding drift.
pub const TRANSCRIPTION_SUM_TOLERANCE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTables", into = "RawTables")]
pub struct WeightTables {
    m_table: BTreeMap<ComponentKind, BTreeMap<QuantityKind, f64>>,
    n_table: BTreeMap<QuantityKind, BTreeMap<ComponentKind, f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawTables {
    m_table: BTreeMap<ComponentKind, BTreeMap<QuantityKind, f64>>,
    n_table: BTreeMap<QuantityKind, BTreeMap<ComponentKind, f64>>,
}

impl TryFrom<RawTables> for WeightTables {
    type Error = Error;

    fn try_from(raw: RawTables) -> Result<Self> {
        WeightTables::new(raw.m_table, raw.n_table)
    }
}

impl From<WeightTables> for RawTables {
    fn from(t: WeightTables) -> Self {
        RawTables {
            m_table: t.m_table,
            n_table: t.n_table,
        }
    }
}

impl WeightTables {
    /// Checks that both tables cover exactly the applicable pairs with
    /// positive finite weights.
    pub fn new(
        m_table: BTreeMap<ComponentKind, BTreeMap<QuantityKind, f64>>,
        n_table: BTreeMap<QuantityKind, BTreeMap<ComponentKind, f64>>,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        for c in ComponentKind::ALL {
            match m_table.get(&c) {
                None => problems.push(format!("m_table missing column {c}")),
                Some(col) => {
                    let keys: Vec<_> = col.keys().copied().collect();
                    let mut expected = c.quantities().to_vec();
                    expected.sort();
                    if keys != expected {
                        problems.push(format!(
                            "m_table[{c}] has quantities {keys:?}, expected {expected:?}"
                        ));
                    }
                }
            }
        }
        for q in QuantityKind::ALL {
            match n_table.get(&q) {
                None => problems.push(format!("n_table missing column {q}")),
                Some(col) => {
                    let keys: Vec<_> = col.keys().copied().collect();
                    let expected = q.components();
                    if keys != expected {
                        problems.push(format!(
                            "n_table[{q}] has components {keys:?}, expected {expected:?}"
                        ));
                    }
                }
            }
        }
        let cells = m_table
            .iter()
            .flat_map(|(c, col)| col.iter().map(move |(q, w)| (format!("m_table[{c}][{q}]"), *w)))
            .chain(
                n_table
                    .iter()
                    .flat_map(|(q, col)| col.iter().map(move |(c, w)| (format!("n_table[{q}][{c}]"), *w))),
            );
        for (name, w) in cells {
            if !w.is_finite() || w <= 0.0 {
                problems.push(format!("{name} = {w} is not strictly positive"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidTables(problems.join("; ")));
        }
        Ok(WeightTables { m_table, n_table })
    }

    /// Builds tables from a cell function over every applicable pair.
    pub fn from_fn(
        mut m: impl FnMut(ComponentKind, QuantityKind) -> f64,
        mut n: impl FnMut(QuantityKind, ComponentKind) -> f64,
    ) -> Result<Self> {
        let mut m_table: BTreeMap<ComponentKind, BTreeMap<QuantityKind, f64>> = BTreeMap::new();
        let mut n_table: BTreeMap<QuantityKind, BTreeMap<ComponentKind, f64>> = BTreeMap::new();
        for (c, q) in applicable_pairs() {
            m_table.entry(c).or_default().insert(q, m(c, q));
            n_table.entry(q).or_default().insert(c, n(q, c));
        }
        WeightTables::new(m_table, n_table)
    }

    /// Every cell set to `value`.
    pub fn uniform(value: f64) -> Result<Self> {
        WeightTables::from_fn(|_, _| value, |_, _| value)
    }

    /// The bundled reference tables: quantity-within-component and
    /// component-within-quantity weights from the expert survey,
    /// rounded to two decimals.
    pub fn reference() -> Self {
        WeightTables::from_json(REFERENCE_TABLES_JSON).expect("bundled tables are valid")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidTables(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Load {
            path: path.to_path_buf(),
            line: Some(e.line() as u64),
            reason: e.to_string(),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("weight tables serialize")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_pretty() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn m_table(&self) -> &BTreeMap<ComponentKind, BTreeMap<QuantityKind, f64>> {
        &self.m_table
    }

    pub fn n_table(&self) -> &BTreeMap<QuantityKind, BTreeMap<ComponentKind, f64>> {
        &self.n_table
    }

    pub fn m(&self, component: ComponentKind, quantity: QuantityKind) -> Result<f64> {
        self.m_table
            .get(&component)
            .and_then(|col| col.get(&quantity))
            .copied()
            .ok_or(Error::MissingWeight { component, quantity })
    }

    pub fn n(&self, quantity: QuantityKind, component: ComponentKind) -> Result<f64> {
        self.n_table
            .get(&quantity)
            .and_then(|col| col.get(&component))
            .copied()
            .ok_or(Error::MissingWeight { component, quantity })
    }

    /// `M × N` for one (component, quantity) pair.
    pub fn pair_weight(&self, component: ComponentKind, quantity: QuantityKind) -> Result<f64> {
        Ok(self.n(quantity, component)? * self.m(component, quantity)?)
    }

    /// All applicable pairs with their weights, in canonical order.
    pub fn pair_weights(&self) -> Vec<(ComponentKind, QuantityKind, f64)> {
        applicable_pairs()
            .into_iter()
            .map(|(c, q)| (c, q, self.pair_weight(c, q).expect("tables cover every pair")))
            .collect()
    }

    /// Column sums of the M table (per component) and N table (per quantity).
    pub fn column_sums(&self) -> (BTreeMap<ComponentKind, f64>, BTreeMap<QuantityKind, f64>) {
        let m = self
            .m_table
            .iter()
            .map(|(c, col)| (*c, col.values().sum()))
            .collect();
        let n = self
            .n_table
            .iter()
            .map(|(q, col)| (*q, col.values().sum()))
            .collect();
        (m, n)
    }

    /// Columns whose sum is farther than `tolerance` from 100.
    pub fn columns_off_hundred(&self, tolerance: f64) -> Vec<(String, f64)> {
        let (m, n) = self.column_sums();
        m.into_iter()
            .map(|(c, s)| (format!("M[{c}]"), s))
            .chain(n.into_iter().map(|(q, s)| (format!("N[{q}]"), s)))
            .filter(|(_, s)| (s - 100.0).abs() > tolerance)
            .collect()
    }

    /// Every cell multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        WeightTables::from_fn(
            |c, q| self.m_table[&c][&q] * factor,
            |q, c| self.n_table[&q][&c] * factor,
        )
    }
}

/// Importance weight of one signal.
pub fn signal_weight(descriptor: &SignalDescriptor, tables: &WeightTables) -> Result<f64> {
    tables.pair_weight(descriptor.component, descriptor.quantity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ComponentKind::*;
    use QuantityKind::*;

    #[test]
    fn reference_tables_load() {
        let t = WeightTables::reference();
        assert_eq!(t.m(TransmissionLine, Kv).unwrap(), 6.27);
        assert_eq!(t.n(Kv, TransmissionLine).unwrap(), 14.53);
        assert_eq!(t.m(Busbar, Kv).unwrap(), 71.1);
        assert_eq!(t.n(Status, Busbar).unwrap(), 4.6);
        assert_eq!(t.pair_weights().len(), 20);
    }

    #[test]
    fn worked_signal_weights() {
        let t = WeightTables::reference();
        let line_kv = SignalDescriptor::new("l", "A", "S", TransmissionLine, Kv).unwrap();
        assert_eq!(signal_weight(&line_kv, &t).unwrap(), 14.53 * 6.27);
        assert!((signal_weight(&line_kv, &t).unwrap() - 91.1031).abs() < 1e-9);
        assert!((t.pair_weight(Busbar, Kv).unwrap() - 3237.183).abs() < 1e-9);
        assert!((t.pair_weight(Generator, Mw).unwrap() - 2810.355).abs() < 1e-9);
    }

    #[test]
    fn missing_cell_rejected() {
        let mut raw: serde_json::Value = serde_json::from_str(REFERENCE_TABLES_JSON).unwrap();
        raw["m_table"]["BUSBAR"].as_object_mut().unwrap().remove("KV");
        let err = WeightTables::from_json(&raw.to_string()).unwrap_err();
        assert!(err.to_string().contains("m_table[BUSBAR]"), "{err}");
    }

    #[test]
    fn extra_cell_rejected() {
        let mut raw: serde_json::Value = serde_json::from_str(REFERENCE_TABLES_JSON).unwrap();
        raw["m_table"]["BUSBAR"]["TAP"] = 1.0.into();
        assert!(WeightTables::from_json(&raw.to_string()).is_err());
    }

    #[test]
    fn non_positive_rejected() {
        let err = WeightTables::uniform(0.0).unwrap_err();
        assert!(err.to_string().contains("strictly positive"));
    }

    #[test]
    fn json_round_trip() {
        let t = WeightTables::reference();
        let back = WeightTables::from_json(&t.to_json_pretty()).unwrap();
        assert_eq!(t, back);
    }
}
