use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDate};
use serde_json::{Map, Value};

use crate::ids::{AiCveId, AiCweId};
use crate::record::{record_from_value, LifecycleStatus, RecordError, StatusChange, VulnerabilityRecord, RECORD_KEYS};

use super::event::{EventPayload, RegistryEvent};

/// Keys a field update may not touch; they change only through their own operations.
pub const IMMUTABLE_FIELDS: [&str; 4] = ["id", "status", "status_history", "severity"];

pub(crate) type OrderKey = (Reverse<Option<NaiveDate>>, AiCveId);

/// Registry contents derived purely from the event log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegistryState {
    records: BTreeMap<AiCveId, VulnerabilityRecord>,
    serials: BTreeMap<u16, u32>,
    by_weakness: BTreeMap<AiCweId, BTreeSet<AiCveId>>,
    by_status: BTreeMap<LifecycleStatus, BTreeSet<AiCveId>>,
    order: BTreeSet<OrderKey>,
    last_sequence: u64,
}

pub(crate) fn order_key(record: &VulnerabilityRecord) -> OrderKey {
    (Reverse(record.report_date), record.id.expect("stored records carry an id"))
}

/// Applies a field patch to a record. Keys outside the record schema land in
/// `extensions`.
pub fn merge_fields(record: &VulnerabilityRecord, fields: &Map<String, Value>) -> Result<VulnerabilityRecord, MergeError> {
    if let Some(key) = fields.keys().find(|k| IMMUTABLE_FIELDS.contains(&k.as_str())) {
        return Err(MergeError::Immutable(key.clone()));
    }
    let Value::Object(mut doc) = serde_json::to_value(record).expect("records serialize") else {
        unreachable!("records serialize as objects");
    };
    for (key, value) in fields {
        if RECORD_KEYS.contains(&key.as_str()) {
            if value.is_null() {
                doc.shift_remove(key);
            } else {
                doc.insert(key.clone(), value.clone());
            }
            continue;
        }
        let extensions = doc
            .entry("extensions")
            .or_insert_with(|| Value::Object(Map::new()))
            .as_object_mut()
            .expect("extensions is an object");
        if value.is_null() {
            extensions.shift_remove(key);
        } else {
            extensions.insert(key.clone(), value.clone());
        }
    }
    record_from_value(Value::Object(doc)).map_err(MergeError::Record)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeError {
    Immutable(String),
    Record(RecordError),
}

impl RegistryState {
    pub fn records(&self) -> impl Iterator<Item = &VulnerabilityRecord> {
        self.records.values()
    }

    pub fn get(&self, id: AiCveId) -> Option<&VulnerabilityRecord> {
        self.records.get(&id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_sequence(&self) -> u64 {
        self.last_sequence
    }

    pub fn highest_serial(&self, year: u16) -> u32 {
        self.serials.get(&year).copied().unwrap_or(0)
    }

    pub(crate) fn ids_with_weakness(&self, id: AiCweId) -> Option<&BTreeSet<AiCveId>> {
        self.by_weakness.get(&id)
    }

    pub(crate) fn ids_with_status(&self, status: LifecycleStatus) -> Option<&BTreeSet<AiCveId>> {
        self.by_status.get(&status)
    }

    pub(crate) fn ordered_ids(&self) -> impl Iterator<Item = AiCveId> + '_ {
        self.order.iter().map(|(_, id)| *id)
    }

    fn unindex(&mut self, record: &VulnerabilityRecord) {
        let id = record.id.expect("stored records carry an id");
        for w in &record.weaknesses {
            if let Some(set) = self.by_weakness.get_mut(w) {
                set.remove(&id);
                if set.is_empty() {
                    self.by_weakness.remove(w);
                }
            }
        }
        if let Some(status) = record.status {
            if let Some(set) = self.by_status.get_mut(&status) {
                set.remove(&id);
                if set.is_empty() {
                    self.by_status.remove(&status);
                }
            }
        }
        self.order.remove(&order_key(record));
    }

    fn index(&mut self, record: &VulnerabilityRecord) {
        let id = record.id.expect("stored records carry an id");
        for w in &record.weaknesses {
            self.by_weakness.entry(*w).or_default().insert(id);
        }
        if let Some(status) = record.status {
            self.by_status.entry(status).or_default().insert(id);
        }
        self.order.insert(order_key(record));
    }

    fn replace(&mut self, record: VulnerabilityRecord) {
        let id = record.id.expect("stored records carry an id");
        if let Some(old) = self.records.remove(&id) {
            self.unindex(&old);
        }
        self.index(&record);
        self.records.insert(id, record);
    }

    /// Applies one event. Errors describe why the event cannot follow the
    /// current state; the state is unchanged on error.
    pub fn apply(&mut self, event: &RegistryEvent) -> Result<(), String> {
        if event.sequence != self.last_sequence + 1 {
            return Err(format!(
                "sequence {} does not follow {}",
                event.sequence, self.last_sequence
            ));
        }
        let id = event.record_id;
        let next = match &event.payload {
            EventPayload::Submitted(sub) => {
                if sub.record.id != Some(id) {
                    return Err("submitted record id differs from the event id".into());
                }
                if self.records.contains_key(&id) {
                    return Err(format!("{id} already exists"));
                }
                if sub.record.status != Some(LifecycleStatus::Reported) || !sub.record.status_history.is_empty() {
                    return Err("submitted records start Reported with no history".into());
                }
                if sub.record.report_date.map(|d| d.year()) != Some(i32::from(id.year())) {
                    return Err(format!("{id} does not match the report year"));
                }
                sub.record.clone()
            }
            EventPayload::FieldsUpdated(update) => {
                let current = self.records.get(&id).ok_or_else(|| format!("{id} does not exist"))?;
                let merged = merge_fields(current, &update.fields).map_err(|e| format!("{e:?}"))?;
                if merged.report_date.map(|d| d.year()) != Some(i32::from(id.year())) {
                    return Err("update moves the report date out of the id year".into());
                }
                merged
            }
            EventPayload::StatusChanged(change) => {
                let current = self.records.get(&id).ok_or_else(|| format!("{id} does not exist"))?;
                if current.status != Some(change.from) {
                    return Err(format!("{id} is not {}", change.from));
                }
                if !change.from.can_transition_to(change.to) {
                    return Err(format!("{} to {} is not an allowed transition", change.from, change.to));
                }
                let mut next = current.clone();
                next.status = Some(change.to);
                next.status_history.push(StatusChange {
                    from: change.from,
                    to: change.to,
                    actor: event.actor.clone(),
                    note: change.note.clone(),
                    at: event.timestamp,
                });
                next
            }
            EventPayload::Rescored(entry) => {
                let current = self.records.get(&id).ok_or_else(|| format!("{id} does not exist"))?;
                let mut next = current.clone();
                next.severity.history = current.severity.history.appended(entry.clone()).map_err(|e| e.to_string())?;
                next
            }
        };
        if matches!(event.payload, EventPayload::Submitted(_)) {
            let serial = self.serials.entry(id.year()).or_insert(0);
            *serial = (*serial).max(id.serial());
        }
        self.replace(next);
        self.last_sequence = event.sequence;
        Ok(())
    }
}
