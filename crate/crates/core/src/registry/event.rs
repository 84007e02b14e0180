use std::fmt;

use chrono::{DateTime, Utc};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::ids::AiCveId;
use crate::record::{LifecycleStatus, VulnerabilityRecord};
use crate::severity::HistoryEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Submitted,
    FieldsUpdated,
    StatusChanged,
    Rescored,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Submitted {
    /// Absent for records restored by import.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cna: Option<String>,
    pub record: VulnerabilityRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsUpdated {
    /// Top-level record keys to replace; `null` clears a field.
    pub fields: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatusChanged {
    pub from: LifecycleStatus,
    pub to: LifecycleStatus,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum EventPayload {
    Submitted(Submitted),
    FieldsUpdated(FieldsUpdated),
    StatusChanged(StatusChanged),
    Rescored(HistoryEntry),
}

impl EventPayload {
    pub fn kind(&self) -> EventKind {
        match self {
            Self::Submitted(_) => EventKind::Submitted,
            Self::FieldsUpdated(_) => EventKind::FieldsUpdated,
            Self::StatusChanged(_) => EventKind::StatusChanged,
            Self::Rescored(_) => EventKind::Rescored,
        }
    }

    fn to_value(&self) -> Value {
        let value = match self {
            Self::Submitted(p) => serde_json::to_value(p),
            Self::FieldsUpdated(p) => serde_json::to_value(p),
            Self::StatusChanged(p) => serde_json::to_value(p),
            Self::Rescored(p) => serde_json::to_value(p),
        };
        value.expect("event payloads serialize")
    }

    fn from_value(kind: EventKind, value: Value) -> Result<Self, serde_json::Error> {
        Ok(match kind {
            EventKind::Submitted => Self::Submitted(serde_json::from_value(value)?),
            EventKind::FieldsUpdated => Self::FieldsUpdated(serde_json::from_value(value)?),
            EventKind::StatusChanged => Self::StatusChanged(serde_json::from_value(value)?),
            EventKind::Rescored => Self::Rescored(serde_json::from_value(value)?),
        })
    }
}

/// One line of the append-only registry log.
#[derive(Debug, Clone, PartialEq)]
pub struct RegistryEvent {
    pub sequence: u64,
    pub record_id: AiCveId,
    pub actor: String,
    pub timestamp: DateTime<Utc>,
    pub payload: EventPayload,
}

impl RegistryEvent {
    pub fn kind(&self) -> EventKind {
        self.payload.kind()
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("events serialize")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireEvent {
    sequence: u64,
    kind: EventKind,
    record_id: AiCveId,
    actor: String,
    timestamp: DateTime<Utc>,
    payload: Value,
}

impl Serialize for RegistryEvent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WireEvent {
            sequence: self.sequence,
            kind: self.kind(),
            record_id: self.record_id,
            actor: self.actor.clone(),
            timestamp: self.timestamp,
            payload: self.payload.to_value(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RegistryEvent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = WireEvent::deserialize(deserializer)?;
        let payload = EventPayload::from_value(wire.kind, wire.payload)
            .map_err(|e| de::Error::custom(format!("{} payload: {e}", wire.kind)))?;
        Ok(Self {
            sequence: wire.sequence,
            record_id: wire.record_id,
            actor: wire.actor,
            timestamp: wire.timestamp,
            payload,
        })
    }
}
