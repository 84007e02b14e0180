//! Event-sourced registry: id assignment, the disclosure lifecycle, rescoring
//! and queries.
//!
//! Every mutation is expressed as a [`RegistryEvent`], persisted first and then
//! applied through [`RegistryState::apply`], the same function [`replay`] uses.
//! The registry takes `&mut self` for writes; callers sharing one across tasks
//! wrap it in a lock, which gives the single-writer ordering.

mod clock;
mod cna;
mod event;
mod query;
mod state;
pub mod store;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::Datelike;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::aibom::serialize_aibom;
use crate::catalog::{Catalog, CatalogError};
use crate::ids::AiCveId;
use crate::record::{parse_record, serialize_record, LifecycleStatus, RecordError, VulnerabilityRecord};
use crate::seed::seed_catalog;
use crate::severity::{reassess, ScoreError, SeverityVector, Trigger};
use crate::validation::{ValidationProfile, ValidationReport};

pub use clock::{Clock, ManualClock, SystemClock};
pub use cna::{is_valid_slug, CnaRegistration, YearRange};
pub use event::{EventKind, EventPayload, FieldsUpdated, RegistryEvent, StatusChanged, Submitted};
pub use query::{parse_filter_params, Page, QueryFilter, DEFAULT_PAGE_SIZE};
pub use state::{merge_fields, MergeError, RegistryState, IMMUTABLE_FIELDS};

use store::{
    io_error, read_catalog_dir, read_cnas, read_events, write_atomic, write_catalog_dir, write_cnas, EventFile,
    AIBOM_DIR, CATALOG_DIR, CNAS_FILE, EVENTS_FILE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("unknown CNA {0}")]
    UnknownCna(String),
    #[error("CNA {0} is already registered")]
    DuplicateCna(String),
    #[error("bad CNA registration: {0}")]
    BadCna(String),
    #[error("CNA {cna} may not assign ids for {year}")]
    YearOutOfRange { cna: String, year: i32 },
    #[error("validation failed: {0}")]
    ValidationFailed(ValidationReport),
    #[error("{0} not found")]
    NotFound(String),
    #[error("illegal transition {from} -> {to}")]
    IllegalTransition { from: LifecycleStatus, to: LifecycleStatus },
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("bad filter: {0}")]
    BadFilter(String),
    #[error("bad update: {0}")]
    BadUpdate(String),
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("expected event sequence {expected}, found {found}")]
    GapInSequence { expected: u64, found: u64 },
    #[error("corrupt event{}: {reason}", .sequence.map(|s| format!(" {s}")).unwrap_or_default())]
    CorruptEvent { sequence: Option<u64>, reason: String },
    #[error("{0} already exists")]
    DuplicateRecord(String),
    #[error("bad import: {0}")]
    BadImport(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("corrupt store: {0}")]
    CorruptStore(String),
}

impl RegistryError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnknownCna(_) => "UNKNOWN_CNA",
            Self::DuplicateCna(_) => "DUPLICATE_CNA",
            Self::BadCna(_) => "BAD_CNA",
            Self::YearOutOfRange { .. } => "YEAR_OUT_OF_RANGE",
            Self::ValidationFailed(_) => "VALIDATION_FAILED",
            Self::NotFound(_) => "NOT_FOUND",
            Self::IllegalTransition { .. } => "ILLEGAL_TRANSITION",
            Self::Score(e) => e.code(),
            Self::BadFilter(_) => "BAD_FILTER",
            Self::BadUpdate(_) => "BAD_UPDATE",
            Self::Record(e) => e.code(),
            Self::GapInSequence { .. } => "GAP_IN_SEQUENCE",
            Self::CorruptEvent { .. } => "CORRUPT_EVENT",
            Self::DuplicateRecord(_) => "DUPLICATE_RECORD",
            Self::BadImport(_) => "BAD_IMPORT",
            Self::Catalog(e) => e.code(),
            Self::Io(_) => "IO_ERROR",
            Self::CorruptStore(_) => "CORRUPT_STORE",
        }
    }
}

/// The profile a record must satisfy while it sits in `status`.
pub fn stage_profile(status: LifecycleStatus) -> ValidationProfile {
    use LifecycleStatus::*;
    match status {
        Reported | Rejected => ValidationProfile::Submission,
        Triaged | Deferred | Confirmed => ValidationProfile::Triage,
        Disclosed | Mitigated | Resolved => ValidationProfile::Disclosure,
    }
}

/// The profile gating entry into `status`, if any.
pub fn gate_profile(status: LifecycleStatus) -> Option<ValidationProfile> {
    match status {
        LifecycleStatus::Triaged => Some(ValidationProfile::Triage),
        LifecycleStatus::Disclosed => Some(ValidationProfile::Disclosure),
        _ => None,
    }
}

/// Rebuilds registry state from a log. Sequence numbers must run 1, 2, 3, ...
pub fn replay(events: &[RegistryEvent]) -> Result<RegistryState, RegistryError> {
    let mut state = RegistryState::default();
    for event in events {
        let expected = state.last_sequence() + 1;
        if event.sequence != expected {
            return Err(RegistryError::GapInSequence {
                expected,
                found: event.sequence,
            });
        }
        state.apply(event).map_err(|reason| RegistryError::CorruptEvent {
            sequence: Some(event.sequence),
            reason,
        })?;
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportSummary {
    pub records: usize,
    pub aiboms: usize,
}

pub struct Registry {
    catalog: Catalog,
    cnas: BTreeMap<String, CnaRegistration>,
    state: RegistryState,
    events: Vec<RegistryEvent>,
    clock: Arc<dyn Clock>,
    root: Option<PathBuf>,
    log: Option<EventFile>,
}

impl std::fmt::Debug for Registry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry")
            .field("root", &self.root)
            .field("records", &self.state.len())
            .field("events", &self.events.len())
            .finish()
    }
}

impl Registry {
    /// A registry with no backing files.
    pub fn in_memory(catalog: Catalog, clock: Arc<dyn Clock>) -> Self {
        Self {
            catalog,
            cnas: BTreeMap::new(),
            state: RegistryState::default(),
            events: Vec::new(),
            clock,
            root: None,
            log: None,
        }
    }

    /// Opens (creating if needed) the store at `root` and replays its log.
    pub fn open(root: impl AsRef<Path>, clock: Arc<dyn Clock>) -> Result<Self, RegistryError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root).map_err(|e| io_error(&root, e))?;
        let catalog = read_catalog_dir(&root.join(CATALOG_DIR))
            .map_err(|e| RegistryError::CorruptStore(e.to_string()))?
            .unwrap_or_else(seed_catalog);
        let cnas = read_cnas(&root.join(CNAS_FILE))?
            .into_iter()
            .map(|c| (c.cna_id.clone(), c))
            .collect();
        let events = read_events(&root.join(EVENTS_FILE)).map_err(|e| match e {
            RegistryError::Io(_) => e,
            other => RegistryError::CorruptStore(other.to_string()),
        })?;
        let state = replay(&events).map_err(|e| RegistryError::CorruptStore(e.to_string()))?;
        let log = EventFile::open(root.join(EVENTS_FILE))?;
        Ok(Self {
            catalog,
            cnas,
            state,
            events,
            clock,
            root: Some(root),
            log: Some(log),
        })
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn state(&self) -> &RegistryState {
        &self.state
    }

    pub fn events(&self) -> &[RegistryEvent] {
        &self.events
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn cnas(&self) -> impl Iterator<Item = &CnaRegistration> {
        self.cnas.values()
    }

    /// Flushes the event log to stable storage.
    pub fn sync(&mut self) -> Result<(), RegistryError> {
        match &mut self.log {
            Some(log) => log.sync(),
            None => Ok(()),
        }
    }

    pub fn register_cna(&mut self, registration: CnaRegistration) -> Result<(), RegistryError> {
        if !is_valid_slug(&registration.cna_id) {
            return Err(RegistryError::BadCna(format!(
                "{:?} is not a lowercase slug",
                registration.cna_id
            )));
        }
        let range = registration.allowed_year_range;
        if range.from > range.to || range.from < AiCveId::MIN_YEAR || range.to > AiCveId::MAX_YEAR {
            return Err(RegistryError::BadCna(format!("year range {}..{} is invalid", range.from, range.to)));
        }
        if self.cnas.contains_key(&registration.cna_id) {
            return Err(RegistryError::DuplicateCna(registration.cna_id));
        }
        let mut next = self.cnas.clone();
        next.insert(registration.cna_id.clone(), registration);
        if let Some(root) = &self.root {
            write_cnas(&root.join(CNAS_FILE), &next.values().collect::<Vec<_>>())?;
        }
        self.cnas = next;
        Ok(())
    }

    pub fn get(&self, id: AiCveId) -> Result<&VulnerabilityRecord, RegistryError> {
        self.state.get(id).ok_or_else(|| RegistryError::NotFound(id.to_string()))
    }

    /// The id the next submission by `cna_id` for `year` receives.
    ///
    /// Serials are drawn from one sequence per year shared by all CNAs, so
    /// every CNA sees its own serials increase and no two records collide.
    pub fn assign_id(&self, cna_id: &str, year: i32) -> Result<AiCveId, RegistryError> {
        let cna = self
            .cnas
            .get(cna_id)
            .ok_or_else(|| RegistryError::UnknownCna(cna_id.to_string()))?;
        let out_of_range = || RegistryError::YearOutOfRange {
            cna: cna_id.to_string(),
            year,
        };
        let year = u16::try_from(year).map_err(|_| out_of_range())?;
        if !cna.allowed_year_range.contains(year) {
            return Err(out_of_range());
        }
        let serial = self.state.highest_serial(year) + 1;
        Ok(AiCveId::new(year, serial).expect("year and serial within range"))
    }

    fn validate(&self, record: &VulnerabilityRecord, profile: ValidationProfile) -> ValidationReport {
        crate::record::validate_record(record, profile, &self.catalog, self.clock.now().date_naive())
    }

    fn commit(&mut self, record_id: AiCveId, actor: &str, payload: EventPayload) -> Result<&VulnerabilityRecord, RegistryError> {
        let event = RegistryEvent {
            sequence: self.state.last_sequence() + 1,
            record_id,
            actor: actor.to_string(),
            timestamp: self.clock.now(),
            payload,
        };
        self.commit_event(event)?;
        self.get(record_id)
    }

    fn commit_event(&mut self, event: RegistryEvent) -> Result<(), RegistryError> {
        let mut next = self.state.clone();
        next.apply(&event).map_err(|reason| RegistryError::CorruptEvent {
            sequence: Some(event.sequence),
            reason,
        })?;
        if let Some(log) = &mut self.log {
            log.append(&event)?;
        }
        self.state = next;
        self.events.push(event);
        Ok(())
    }

    /// Stores a draft under a fresh id with status Reported.
    pub fn submit(&mut self, draft: VulnerabilityRecord, cna_id: &str) -> Result<VulnerabilityRecord, RegistryError> {
        if !self.cnas.contains_key(cna_id) {
            return Err(RegistryError::UnknownCna(cna_id.to_string()));
        }
        let report = self.validate(&draft, ValidationProfile::Submission);
        if !report.is_valid() {
            return Err(RegistryError::ValidationFailed(report));
        }
        let year = draft.report_date.expect("submission profile requires a report date").year();
        let id = self.assign_id(cna_id, year)?;
        let mut record = draft;
        record.id = Some(id);
        record.status = Some(LifecycleStatus::Reported);
        record.status_history.clear();
        let payload = EventPayload::Submitted(Submitted {
            cna: Some(cna_id.to_string()),
            record,
        });
        self.commit(id, cna_id, payload).cloned()
    }

    /// Replaces top-level fields and revalidates at the record's current stage.
    pub fn update_fields(
        &mut self,
        id: AiCveId,
        fields: Map<String, Value>,
        actor: &str,
    ) -> Result<VulnerabilityRecord, RegistryError> {
        let current = self.get(id)?;
        let merged = merge_fields(current, &fields).map_err(|e| match e {
            MergeError::Immutable(key) => RegistryError::BadUpdate(format!("{key} cannot be changed by a field update")),
            MergeError::Record(e) => RegistryError::Record(e),
        })?;
        if merged.report_date.map(|d| d.year()) != Some(i32::from(id.year())) {
            return Err(RegistryError::BadUpdate(format!(
                "report_date must stay within {}",
                id.year()
            )));
        }
        let status = merged.status.unwrap_or(LifecycleStatus::Reported);
        let report = self.validate(&merged, stage_profile(status));
        if !report.is_valid() {
            return Err(RegistryError::ValidationFailed(report));
        }
        self.commit(id, actor, EventPayload::FieldsUpdated(FieldsUpdated { fields }))
            .cloned()
    }

    pub fn transition_status(
        &mut self,
        id: AiCveId,
        to: LifecycleStatus,
        actor: &str,
        note: &str,
    ) -> Result<VulnerabilityRecord, RegistryError> {
        let current = self.get(id)?;
        let from = current.status.unwrap_or(LifecycleStatus::Reported);
        if !from.can_transition_to(to) {
            return Err(RegistryError::IllegalTransition { from, to });
        }
        if let Some(profile) = gate_profile(to) {
            let report = self.validate(current, profile);
            if !report.is_valid() {
                return Err(RegistryError::ValidationFailed(report));
            }
        }
        let payload = EventPayload::StatusChanged(StatusChanged {
            from,
            to,
            note: note.to_string(),
        });
        self.commit(id, actor, payload).cloned()
    }

    pub fn rescore(
        &mut self,
        id: AiCveId,
        vector: &SeverityVector,
        trigger: Trigger,
        actor: &str,
        note: &str,
    ) -> Result<VulnerabilityRecord, RegistryError> {
        let current = self.get(id)?;
        let history = reassess(&current.severity.history, vector, trigger, note, self.clock.now())?;
        let entry = history.entries().last().expect("reassess appends").clone();
        self.commit(id, actor, EventPayload::Rescored(entry)).cloned()
    }

    pub fn query(&self, filter: &QueryFilter) -> Result<Page, RegistryError> {
        filter.check().map_err(RegistryError::BadFilter)?;
        Ok(query::run_query(&self.state, filter))
    }

    /// Writes canonical records, the catalog, AIBOM copies and CNAs under `dir`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<ExportSummary, RegistryError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir.join(AIBOM_DIR)).map_err(|e| io_error(dir, e))?;
        write_catalog_dir(&dir.join(CATALOG_DIR), &self.catalog)?;
        write_cnas(&dir.join(CNAS_FILE), &self.cnas.values().collect::<Vec<_>>())?;
        let mut summary = ExportSummary { records: 0, aiboms: 0 };
        for record in self.state.records() {
            let id = record.id.expect("stored records carry an id");
            write_atomic(&dir.join(format!("{id}.json")), &serialize_record(record))?;
            summary.records += 1;
            if let Some(doc) = &record.ai_system.aibom {
                write_atomic(&dir.join(AIBOM_DIR).join(format!("{id}.json")), &serialize_aibom(doc))?;
                summary.aiboms += 1;
            }
        }
        Ok(summary)
    }

    /// Restores records from an export directory.
    ///
    /// Each record becomes a Submitted event followed by one StatusChanged
    /// event per entry of its status history, so the imported state matches
    /// the exported one. Nothing is written unless every record checks out.
    pub fn import(&mut self, dir: impl AsRef<Path>, actor: &str) -> Result<Vec<AiCveId>, RegistryError> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(RegistryError::Io(format!("{} is not a directory", dir.display())));
        }

        let imported_catalog = read_catalog_dir(&dir.join(CATALOG_DIR))?;
        if let Some(catalog) = &imported_catalog {
            let same = catalog.weaknesses().eq(self.catalog.weaknesses())
                && catalog.mitigations().eq(self.catalog.mitigations());
            if !same && !self.state.is_empty() {
                return Err(RegistryError::BadImport(
                    "the export carries a different catalog and this store is not empty".into(),
                ));
            }
        }
        let catalog = imported_catalog.clone().unwrap_or_else(|| self.catalog.clone());

        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| io_error(dir, e))?
            .filter_map(Result::ok)
            .map(|entry| entry.path())
            .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "json"))
            .filter(|p| p.file_name().is_some_and(|n| n != CNAS_FILE))
            .collect();
        files.sort();

        let mut records = BTreeMap::new();
        for path in &files {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let bad = |msg: String| RegistryError::BadImport(format!("{}: {msg}", path.display()));
            let record = parse_record(&text).map_err(|e| bad(format!("{} {e}", e.code())))?;
            let id = record.id.ok_or_else(|| bad("record has no id".into()))?;
            if self.state.get(id).is_some() || records.contains_key(&id) {
                return Err(RegistryError::DuplicateRecord(id.to_string()));
            }
            check_history(&record).map_err(bad)?;
            let status = record.status.unwrap_or(LifecycleStatus::Reported);
            let report = crate::record::validate_record(&record, stage_profile(status), &catalog, self.clock.now().date_naive());
            if !report.is_valid() {
                return Err(RegistryError::ValidationFailed(report));
            }
            records.insert(id, record);
        }
        for name in fs::read_dir(dir.join(AIBOM_DIR)).into_iter().flatten().filter_map(Result::ok) {
            let path = name.path();
            let text = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
            crate::aibom::parse_aibom(&text)
                .map_err(|e| RegistryError::BadImport(format!("{}: {e}", path.display())))?;
        }

        let imported_cnas = read_cnas(&dir.join(CNAS_FILE))?;

        let batch = self.import_events(&records, actor)?;

        if let (Some(catalog), Some(root)) = (&imported_catalog, &self.root) {
            write_catalog_dir(&root.join(CATALOG_DIR), catalog)?;
        }
        if let Some(catalog) = imported_catalog {
            self.catalog = catalog;
        }
        for cna in imported_cnas {
            if !self.cnas.contains_key(&cna.cna_id) {
                self.register_cna(cna)?;
            }
        }
        for event in batch {
            self.commit_event(event)?;
        }
        Ok(records.into_keys().collect())
    }

    /// Events that recreate `records`, checked against a scratch copy of the
    /// current state so nothing is committed unless all of them apply.
    fn import_events(
        &self,
        records: &BTreeMap<AiCveId, VulnerabilityRecord>,
        actor: &str,
    ) -> Result<Vec<RegistryEvent>, RegistryError> {
        let mut scratch = self.state.clone();
        let mut batch = Vec::new();
        let now = self.clock.now();
        for (id, record) in records {
            let mut submitted = record.clone();
            submitted.status = Some(LifecycleStatus::Reported);
            submitted.status_history.clear();
            let mut events = vec![RegistryEvent {
                sequence: 0,
                record_id: *id,
                actor: actor.to_string(),
                timestamp: now,
                payload: EventPayload::Submitted(Submitted {
                    cna: None,
                    record: submitted,
                }),
            }];
            for change in &record.status_history {
                events.push(RegistryEvent {
                    sequence: 0,
                    record_id: *id,
                    actor: change.actor.clone(),
                    timestamp: change.at,
                    payload: EventPayload::StatusChanged(StatusChanged {
                        from: change.from,
                        to: change.to,
                        note: change.note.clone(),
                    }),
                });
            }
            for mut event in events {
                event.sequence = scratch.last_sequence() + 1;
                scratch
                    .apply(&event)
                    .map_err(|reason| RegistryError::BadImport(format!("{id}: {reason}")))?;
                batch.push(event);
            }
        }
        Ok(batch)
    }

    /// Loads the seed record through the import path. Fails with
    /// DUPLICATE_RECORD when it is already present.
    pub fn load_seed(&mut self, actor: &str) -> Result<AiCveId, RegistryError> {
        let record = crate::seed::seed_record();
        let id = record.id.expect("seed record has an id");
        if self.state.get(id).is_some() {
            return Err(RegistryError::DuplicateRecord(id.to_string()));
        }
        let report = crate::record::validate_record(
            &record,
            stage_profile(record.status.unwrap_or(LifecycleStatus::Reported)),
            &self.catalog,
            self.clock.now().date_naive(),
        );
        if !report.is_valid() {
            return Err(RegistryError::ValidationFailed(report));
        }
        for event in self.import_events(&BTreeMap::from([(id, record)]), actor)? {
            self.commit_event(event)?;
        }
        Ok(id)
    }
}

/// The status history must be an unbroken chain of allowed edges from
/// Reported to the current status.
fn check_history(record: &VulnerabilityRecord) -> Result<(), String> {
    let mut at = LifecycleStatus::Reported;
    for change in &record.status_history {
        if change.from != at || !change.from.can_transition_to(change.to) {
            return Err(format!("status history breaks at {} -> {}", change.from, change.to));
        }
        at = change.to;
    }
    if record.status.unwrap_or(LifecycleStatus::Reported) != at {
        return Err(format!("status does not match the end of its history ({at})"));
    }
    Ok(())
}
