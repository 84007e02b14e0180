//! On-disk layout of a registry store and of export directories.
//!
//! ```text
//! <root>/events.ndjson          append-only event log
//! <root>/cnas.json              registered naming authorities
//! <root>/catalog/*.json         catalog documents (seed catalog when absent)
//! ```
//!
//! An export directory holds `<AI-CVE-ID>.json` records, `catalog/`,
//! `aibom/<AI-CVE-ID>.json` copies of embedded AIBOMs and `cnas.json`.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::catalog::{load_catalog, Catalog};

use super::cna::CnaRegistration;
use super::event::RegistryEvent;
use super::RegistryError;

pub const EVENTS_FILE: &str = "events.ndjson";
pub const CNAS_FILE: &str = "cnas.json";
pub const CATALOG_DIR: &str = "catalog";
pub const AIBOM_DIR: &str = "aibom";
pub const WEAKNESSES_FILE: &str = "weaknesses.json";
pub const MITIGATIONS_FILE: &str = "mitigations.json";
pub const LOCAL_CATALOG_VERSION: &str = "local";

pub(crate) fn io_error(path: &Path, err: std::io::Error) -> RegistryError {
    RegistryError::Io(format!("{}: {err}", path.display()))
}

/// Writes through a temporary sibling so readers never see a partial file.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<(), RegistryError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| io_error(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}

#[derive(Debug)]
pub(crate) struct EventFile {
    path: PathBuf,
    file: File,
}

impl EventFile {
    pub(crate) fn open(path: PathBuf) -> Result<Self, RegistryError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| io_error(&path, e))?;
        Ok(Self { path, file })
    }

    pub(crate) fn append(&mut self, event: &RegistryEvent) -> Result<(), RegistryError> {
        let mut line = event.to_line();
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|()| self.file.flush())
            .map_err(|e| io_error(&self.path, e))
    }

    pub(crate) fn sync(&mut self) -> Result<(), RegistryError> {
        self.file.sync_all().map_err(|e| io_error(&self.path, e))
    }
}

pub(crate) fn read_events(path: &Path) -> Result<Vec<RegistryEvent>, RegistryError> {
    let file = match File::open(path) {
        Ok(file) => file,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_error(path, e)),
    };
    let mut events = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line).map_err(|e| RegistryError::CorruptEvent {
            sequence: None,
            reason: format!("line {}: {e}", n + 1),
        })?;
        events.push(event);
    }
    Ok(events)
}

pub(crate) fn read_cnas(path: &Path) -> Result<Vec<CnaRegistration>, RegistryError> {
    match fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map_err(|e| RegistryError::CorruptStore(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(io_error(path, e)),
    }
}

pub(crate) fn write_cnas(path: &Path, cnas: &[&CnaRegistration]) -> Result<(), RegistryError> {
    write_atomic(path, &(serde_json::to_string_pretty(cnas).expect("cnas serialize") + "\n"))
}

/// Loads every `*.json` file of `dir` as one catalog, or `None` if `dir` is absent.
pub(crate) fn read_catalog_dir(dir: &Path) -> Result<Option<Catalog>, RegistryError> {
    if !dir.is_dir() {
        return Ok(None);
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .filter_map(Result::ok)
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let documents = paths
        .iter()
        .map(|p| fs::read_to_string(p).map_err(|e| io_error(p, e)))
        .collect::<Result<Vec<_>, _>>()?;
    load_catalog(LOCAL_CATALOG_VERSION, &documents)
        .map(Some)
        .map_err(RegistryError::Catalog)
}

pub(crate) fn write_catalog_dir(dir: &Path, catalog: &Catalog) -> Result<(), RegistryError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    write_atomic(&dir.join(WEAKNESSES_FILE), &catalog.weaknesses_document())?;
    write_atomic(&dir.join(MITIGATIONS_FILE), &catalog.mitigations_document())
}
