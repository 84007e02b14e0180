//! AI Bill of Materials documents: parse, validate, diff/patch and link to records.

mod document;
mod path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::record::VulnerabilityRecord;
use crate::validation::ValidationReport;

pub use document::{
    AibomDocument, ConsiderationSection, DataAvailability, DataSection, Dependency, Measure, MetaSection,
    ModelAvailability, ModelSection, UsageSection, AIBOM_FIELDS, AIBOM_SECTIONS,
};
pub use path::{FieldPath, PathSyntaxError, Segment};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AibomError {
    #[error("malformed AIBOM document: {0}")]
    MalformedDocument(String),
    #[error("bad component path {path}: {reason}")]
    BadPath { path: String, reason: String },
    #[error("diff does not apply at {0}")]
    PatchConflict(String),
}

impl AibomError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::MalformedDocument(_) => "MALFORMED_DOCUMENT",
            Self::BadPath { .. } => "BAD_PATH",
            Self::PatchConflict(_) => "PATCH_CONFLICT",
        }
    }
}

pub fn parse_aibom(text: &str) -> Result<AibomDocument, AibomError> {
    let value: Value = serde_json::from_str(text).map_err(|e| AibomError::MalformedDocument(e.to_string()))?;
    aibom_from_value(value)
}

pub fn aibom_from_value(value: Value) -> Result<AibomDocument, AibomError> {
    if !value.is_object() {
        return Err(AibomError::MalformedDocument("expected a JSON object".into()));
    }
    serde_json::from_value(value).map_err(|e| AibomError::MalformedDocument(e.to_string()))
}

/// Pretty JSON with two-space indentation and a trailing newline.
pub fn serialize_aibom(doc: &AibomDocument) -> String {
    serde_json::to_string_pretty(doc).expect("AIBOM documents serialize") + "\n"
}

pub fn aibom_to_value(doc: &AibomDocument) -> Value {
    serde_json::to_value(doc).expect("AIBOM documents serialize")
}

/// Missing identity fields are errors; empty recommended sections are warnings.
pub fn validate_aibom(doc: &AibomDocument) -> ValidationReport {
    let mut report = ValidationReport::new(None);
    check_aibom_into(doc, "", &mut report);
    report
}

pub(crate) fn check_aibom_into(doc: &AibomDocument, prefix: &str, report: &mut ValidationReport) {
    let at = |p: &str| format!("{prefix}{p}");
    if doc.meta.creator.trim().is_empty() {
        report.error("MISSING_FIELD", at("meta.creator"), "creator is required");
    }
    if doc.meta.release_date.is_none() {
        report.error("MISSING_FIELD", at("meta.release_date"), "release date is required");
    }
    if doc.model.foundation_model.trim().is_empty() && doc.model.source.trim().is_empty() {
        report.error(
            "MISSING_FIELD",
            at("model.foundation_model"),
            "a foundation model or a model source is required",
        );
    }
    if doc.data.source.trim().is_empty() {
        report.error("MISSING_FIELD", at("data.source"), "data source is required");
    }
    for (i, dep) in doc.model.dependencies.iter().enumerate() {
        if dep.name.trim().is_empty() {
            report.error(
                "EMPTY_DEPENDENCY_NAME",
                at(&format!("model.dependencies[{i}].name")),
                "dependency name must not be empty",
            );
        }
    }
    if doc.usage.intended.is_empty() {
        report.warning("RECOMMENDED_FIELD_EMPTY", at("usage.intended"), "intended usage is not documented");
    }
    if doc.consideration.risk.is_empty() {
        report.warning("RECOMMENDED_FIELD_EMPTY", at("consideration.risk"), "risks are not documented");
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub path: FieldPath,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after: Option<Value>,
}

/// Structural difference between two documents, in document field order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AibomDiff {
    pub added: Vec<DiffEntry>,
    pub removed: Vec<DiffEntry>,
    pub modified: Vec<DiffEntry>,
}

impl AibomDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.modified.is_empty()
    }

    pub fn len(&self) -> usize {
        self.added.len() + self.removed.len() + self.modified.len()
    }
}

pub fn diff_aibom(a: &AibomDocument, b: &AibomDocument) -> AibomDiff {
    let mut diff = AibomDiff::default();
    diff_values(&FieldPath::root(), &aibom_to_value(a), &aibom_to_value(b), &mut diff);
    diff
}

fn diff_values(path: &FieldPath, a: &Value, b: &Value, out: &mut AibomDiff) {
    match (a, b) {
        (Value::Object(left), Value::Object(right)) => {
            for (key, lv) in left {
                match right.get(key) {
                    Some(rv) => diff_values(&path.key(key.clone()), lv, rv, out),
                    None => out.removed.push(DiffEntry {
                        path: path.key(key.clone()),
                        before: Some(lv.clone()),
                        after: None,
                    }),
                }
            }
            for (key, rv) in right {
                if !left.contains_key(key) {
                    out.added.push(DiffEntry {
                        path: path.key(key.clone()),
                        before: None,
                        after: Some(rv.clone()),
                    });
                }
            }
        }
        (Value::Array(left), Value::Array(right)) => {
            let common = left.len().min(right.len());
            for i in 0..common {
                diff_values(&path.index(i), &left[i], &right[i], out);
            }
            for (i, rv) in right.iter().enumerate().skip(common) {
                out.added.push(DiffEntry {
                    path: path.index(i),
                    before: None,
                    after: Some(rv.clone()),
                });
            }
            for (i, lv) in left.iter().enumerate().skip(common) {
                out.removed.push(DiffEntry {
                    path: path.index(i),
                    before: Some(lv.clone()),
                    after: None,
                });
            }
        }
        _ if a != b => out.modified.push(DiffEntry {
            path: path.clone(),
            before: Some(a.clone()),
            after: Some(b.clone()),
        }),
        _ => {}
    }
}

/// Applies `diff` to `doc`. Every `before` value must match what is found.
pub fn apply_diff(doc: &AibomDocument, diff: &AibomDiff) -> Result<AibomDocument, AibomError> {
    let mut root = aibom_to_value(doc);
    let conflict = |p: &FieldPath| AibomError::PatchConflict(p.to_string());

    // Removals run back to front so array indices stay valid.
    for entry in diff.removed.iter().rev() {
        let (parent_path, last) = entry.path.parent().ok_or_else(|| conflict(&entry.path))?;
        if entry.path.resolve(&root) != entry.before.as_ref() {
            return Err(conflict(&entry.path));
        }
        match (parent_path.resolve_mut(&mut root), last) {
            (Some(Value::Object(map)), Segment::Key(k)) => {
                map.shift_remove(k);
            }
            (Some(Value::Array(items)), Segment::Index(i)) if *i < items.len() => {
                items.remove(*i);
            }
            _ => return Err(conflict(&entry.path)),
        }
    }
    for entry in &diff.modified {
        let slot = entry.path.resolve_mut(&mut root).ok_or_else(|| conflict(&entry.path))?;
        if Some(&*slot) != entry.before.as_ref() {
            return Err(conflict(&entry.path));
        }
        *slot = entry.after.clone().ok_or_else(|| conflict(&entry.path))?;
    }
    for entry in &diff.added {
        let (parent_path, last) = entry.path.parent().ok_or_else(|| conflict(&entry.path))?;
        let value = entry.after.clone().ok_or_else(|| conflict(&entry.path))?;
        match (parent_path.resolve_mut(&mut root), last) {
            (Some(Value::Object(map)), Segment::Key(k)) if !map.contains_key(k) => {
                map.insert(k.clone(), value);
            }
            (Some(Value::Array(items)), Segment::Index(i)) if *i == items.len() => items.push(value),
            _ => return Err(conflict(&entry.path)),
        }
    }
    aibom_from_value(root)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkedComponent {
    pub path: FieldPath,
    pub value: Value,
}

/// A record bound to the AIBOM of the affected system, optionally narrowed to
/// the components implicated by the flaw.
#[derive(Debug, Clone, PartialEq)]
pub struct AibomLinkage {
    pub record: VulnerabilityRecord,
    pub components: Vec<LinkedComponent>,
}

pub fn link_aibom<P: AsRef<str>>(
    record: &VulnerabilityRecord,
    doc: &AibomDocument,
    component_paths: &[P],
) -> Result<AibomLinkage, AibomError> {
    let tree = aibom_to_value(doc);
    let mut components = Vec::with_capacity(component_paths.len());
    for raw in component_paths {
        let raw = raw.as_ref();
        let bad = |reason: &str| AibomError::BadPath {
            path: raw.to_string(),
            reason: reason.to_string(),
        };
        let path: FieldPath = raw.parse().map_err(|_| bad("not a field path"))?;
        let known_section = matches!(path.segments().first(), Some(Segment::Key(k)) if AIBOM_SECTIONS.contains(&k.as_str()));
        if !known_section || path.segments().len() < 2 {
            return Err(bad("paths must name a field inside a section"));
        }
        let value = path.resolve(&tree).ok_or_else(|| bad("no such populated field in the document"))?;
        components.push(LinkedComponent {
            path,
            value: value.clone(),
        });
    }
    let mut record = record.clone();
    record.ai_system.aibom = Some(doc.clone());
    record.ai_system.components = components.iter().map(|c| c.path.to_string()).collect();
    Ok(AibomLinkage { record, components })
}
