//! Closed vocabularies for telemetry signals: measured quantities, source
//! components, validity tags, and which quantities each component reports.
//!
//! Tokens parse case-insensitively and serialize upper-case. The reactive
//! power quantity accepts both `MV` and `MVAR` and always serializes as
//! `MVAR`, so it cannot be confused with megavolts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

macro_rules! token_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.token())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let raw = String::deserialize(d)?;
                raw.parse().map_err(serde::de::Error::custom)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }
    };
}

/// Kind of physical quantity a signal carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuantityKind {
    Mw,
    Mvar,
    Kv,
    Tap,
    Status,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 5] = [
        QuantityKind::Mw,
        QuantityKind::Mvar,
        QuantityKind::Kv,
        QuantityKind::Tap,
        QuantityKind::Status,
    ];

    pub fn token(self) -> &'static str {
        match self {
            QuantityKind::Mw => "MW",
            QuantityKind::Mvar => "MVAR",
            QuantityKind::Kv => "KV",
            QuantityKind::Tap => "TAP",
            QuantityKind::Status => "STATUS",
        }
    }

    /// Components that report this quantity, in canonical order.
    pub fn components(self) -> Vec<ComponentKind> {
        ComponentKind::ALL
            .into_iter()
            .filter(|c| validate_pair(*c, self))
            .collect()
    }
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "MW" => Ok(QuantityKind::Mw),
            "MV" | "MVAR" => Ok(QuantityKind::Mvar),
            "KV" => Ok(QuantityKind::Kv),
            "TAP" => Ok(QuantityKind::Tap),
            "STATUS" => Ok(QuantityKind::Status),
            _ => Err(Error::Parse {
                kind: "quantity",
                token: s.to_string(),
            }),
        }
    }
}

token_serde!(QuantityKind);

/// Kind of network component a signal originates from.
///
/// Unit and load transformers share one kind, as do reactors and capacitors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentKind {
    UnitLoadTransformer,
    TransmissionTransformer,
    Generator,
    TransmissionLine,
    ReactorCapacitor,
    Busbar,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 6] = [
        ComponentKind::UnitLoadTransformer,
        ComponentKind::TransmissionTransformer,
        ComponentKind::Generator,
        ComponentKind::TransmissionLine,
        ComponentKind::ReactorCapacitor,
        ComponentKind::Busbar,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ComponentKind::UnitLoadTransformer => "UNIT_LOAD_TRANSFORMER",
            ComponentKind::TransmissionTransformer => "TRANSMISSION_TRANSFORMER",
            ComponentKind::Generator => "GENERATOR",
            ComponentKind::TransmissionLine => "TRANSMISSION_LINE",
            ComponentKind::ReactorCapacitor => "REACTOR_CAPACITOR",
            ComponentKind::Busbar => "BUSBAR",
        }
    }

    /// Quantities this component reports, in canonical order.
    pub fn quantities(self) -> &'static [QuantityKind] {
        use QuantityKind::*;
        match self {
            ComponentKind::UnitLoadTransformer | ComponentKind::TransmissionTransformer => {
                &[Mw, Mvar, Tap, Status]
            }
            ComponentKind::Generator | ComponentKind::TransmissionLine => &[Mw, Mvar, Kv, Status],
            ComponentKind::ReactorCapacitor => &[Mvar, Status],
            ComponentKind::Busbar => &[Kv, Status],
        }
    }
}

impl FromStr for ComponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        ComponentKind::ALL
            .into_iter()
            .find(|c| c.token() == upper)
            .ok_or_else(|| Error::Parse {
                kind: "component",
                token: s.to_string(),
            })
    }
}

token_serde!(ComponentKind);

/// Status tag attached to telemetry by the control center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValidityTag {
    /// No information on the data status.
    Faulty,
    /// Last value before disconnection.
    NonCurrent,
    Valid,
    /// Excluded from state estimation on purpose.
    Invalid,
    /// Entered manually by an operator.
    Manual,
}

impl ValidityTag {
    pub const ALL: [ValidityTag; 5] = [
        ValidityTag::Faulty,
        ValidityTag::NonCurrent,
        ValidityTag::Valid,
        ValidityTag::Invalid,
        ValidityTag::Manual,
    ];

    /// Single-letter serialized code.
    pub fn token(self) -> &'static str {
        match self {
            ValidityTag::Faulty => "F",
            ValidityTag::NonCurrent => "N",
            ValidityTag::Valid => "V",
            ValidityTag::Invalid => "I",
            ValidityTag::Manual => "M",
        }
    }
}

impl FromStr for ValidityTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_tag(s)
    }
}

token_serde!(ValidityTag);

/// Parses a single-letter validity code (`F`, `N`, `V`, `I`, `M`).
pub fn parse_tag(code: &str) -> Result<ValidityTag> {
    let upper = code.trim().to_ascii_uppercase();
    ValidityTag::ALL
        .into_iter()
        .find(|t| t.token() == upper)
        .ok_or_else(|| Error::Parse {
            kind: "validity tag",
            token: code.to_string(),
        })
}

/// Whether `component` reports `quantity`.
pub fn validate_pair(component: ComponentKind, quantity: QuantityKind) -> bool {
    component.quantities().contains(&quantity)
}

/// Every valid (component, quantity) pair in canonical order.
pub fn applicable_pairs() -> Vec<(ComponentKind, QuantityKind)> {
    ComponentKind::ALL
        .into_iter()
        .flat_map(|c| c.quantities().iter().map(move |q| (c, *q)))
        .collect()
}

/// One telemetry point in a signal inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalDescriptor {
    pub signal_id: String,
    pub area: String,
    pub station: String,
    pub component: ComponentKind,
    pub quantity: QuantityKind,
    /// Named in an operating instruction; doubles the signal's weight.
    pub in_instruction: bool,
    /// Counted by the weighted index. Out-of-scope signals still count in
    /// the unweighted index.
    pub weighted_scope: bool,
}

impl SignalDescriptor {
    pub fn new(
        signal_id: impl Into<String>,
        area: impl Into<String>,
        station: impl Into<String>,
        component: ComponentKind,
        quantity: QuantityKind,
    ) -> Result<Self> {
        let descriptor = SignalDescriptor {
            signal_id: signal_id.into(),
            area: area.into(),
            station: station.into(),
            component,
            quantity,
            in_instruction: false,
            weighted_scope: true,
        };
        descriptor.validate()?;
        Ok(descriptor)
    }

    pub fn in_instruction(mut self, flag: bool) -> Self {
        self.in_instruction = flag;
        self
    }

    pub fn weighted_scope(mut self, flag: bool) -> Self {
        self.weighted_scope = flag;
        self
    }

    pub fn validate(&self) -> Result<()> {
        // CSV fields are trimmed on read, so padded labels would not survive a round trip.
        for (field, value) in [
            ("signal_id", &self.signal_id),
            ("area", &self.area),
            ("station", &self.station),
        ] {
            if value.is_empty() {
                return Err(Error::Validation(format!("{field} must not be empty")));
            }
            if value.trim() != value {
                return Err(Error::Validation(format!(
                    "{field} `{value}` has leading or trailing whitespace"
                )));
            }
        }
        if !validate_pair(self.component, self.quantity) {
            return Err(Error::InvalidPair {
                component: self.component,
                quantity: self.quantity,
            });
        }
        Ok(())
    }
}
