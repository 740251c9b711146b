use std::collections::HashMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use super::csv_rows::{flag, parse_flag, read_rows, render_rows, write_rows};
use crate::error::{Error, Result};
use crate::taxonomy::SignalDescriptor;

pub const INVENTORY_COLUMNS: [&str; 7] = [
    "signal_id",
    "area",
    "station",
    "component",
    "quantity",
    "in_instruction",
    "weighted_scope",
];

/// A validated signal inventory.
#[derive(Debug, Clone, PartialEq)]
pub struct Inventory {
    pub signals: Vec<SignalDescriptor>,
    pub source_path: PathBuf,
    pub loaded_at: DateTime<Utc>,
    by_id: HashMap<String, usize>,
}

impl Inventory {
    pub fn from_signals(signals: Vec<SignalDescriptor>, source_path: impl Into<PathBuf>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(signals.len());
        for (k, s) in signals.iter().enumerate() {
            s.validate()?;
            if by_id.insert(s.signal_id.clone(), k).is_some() {
                return Err(Error::DuplicateSignal(s.signal_id.clone()));
            }
        }
        Ok(Inventory {
            signals,
            source_path: source_path.into(),
            loaded_at: Utc::now(),
            by_id,
        })
    }

    pub fn get(&self, signal_id: &str) -> Option<&SignalDescriptor> {
        self.by_id.get(signal_id).map(|&k| &self.signals[k])
    }

    pub fn contains(&self, signal_id: &str) -> bool {
        self.by_id.contains_key(signal_id)
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }
}

pub fn parse_inventory(path: &Path, text: &str) -> Result<Inventory> {
    let mut signals: Vec<SignalDescriptor> = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    read_rows(path, text, &INVENTORY_COLUMNS, |line, r| {
        let descriptor = SignalDescriptor {
            signal_id: r[0].to_string(),
            area: r[1].to_string(),
            station: r[2].to_string(),
            component: r[3].parse()?,
            quantity: r[4].parse()?,
            in_instruction: parse_flag(&r[5], "in_instruction").map_err(Error::Validation)?,
            weighted_scope: parse_flag(&r[6], "weighted_scope").map_err(Error::Validation)?,
        };
        descriptor.validate()?;
        if let Some(first) = seen.insert(descriptor.signal_id.clone(), line) {
            return Err(Error::Validation(format!(
                "duplicate signal_id `{}` (first seen on line {first})",
                descriptor.signal_id
            )));
        }
        signals.push(descriptor);
        Ok(())
    })?;
    Inventory::from_signals(signals, path)
}

/// Loads and validates an inventory CSV.
pub fn load_inventory(path: impl AsRef<Path>) -> Result<Inventory> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_inventory(path, &text)
}

fn inventory_rows(signals: &[SignalDescriptor]) -> Vec<Vec<String>> {
    signals
        .iter()
        .map(|s| {
            vec![
                s.signal_id.clone(),
                s.area.clone(),
                s.station.clone(),
                s.component.to_string(),
                s.quantity.to_string(),
                flag(s.in_instruction).to_string(),
                flag(s.weighted_scope).to_string(),
            ]
        })
        .collect()
}

pub fn inventory_to_csv(signals: &[SignalDescriptor]) -> String {
    render_rows(&INVENTORY_COLUMNS, inventory_rows(signals))
}

pub fn write_inventory(path: impl AsRef<Path>, signals: &[SignalDescriptor]) -> Result<()> {
    write_rows(path.as_ref(), &INVENTORY_COLUMNS, inventory_rows(signals))
}
