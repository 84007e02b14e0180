//! The canonical AI-CVE record: one field per Minimum Element.

mod exploit;
mod product;
mod status;
mod validate;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::aibom::AibomDocument;
use crate::ids::{AiCveId, AiCweId, IdError, MitigationId};
use crate::reference::Reference;
use crate::severity::{SeverityAssessment, SeverityScore};

pub use exploit::{ExploitabilityProfile, PrivilegeLevel, TechnicalComplexity};
pub use product::{
    parse_product_id, parse_product_prefix, ProductError, ProductIdentifier, MAX_PRODUCT_SEGMENTS,
    MIN_PRODUCT_SEGMENTS,
};
pub use status::{LifecycleStatus, StatusChange};
pub use validate::{validate_record, MinimumElement, MINIMUM_ELEMENTS};

/// Top-level keys of a record document, in serialization order.
pub const RECORD_KEYS: [&str; 17] = [
    "id",
    "ai_system",
    "weaknesses",
    "root_causes",
    "impact",
    "severity",
    "affected_products",
    "exploitability",
    "description",
    "mitigations",
    "references",
    "report_date",
    "reported_by",
    "vendors",
    "status",
    "status_history",
    "extensions",
];

/// The affected model or system. Either embeds a full AIBOM or points at one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AiSystem {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    #[serde(rename = "type", default, skip_serializing_if = "String::is_empty")]
    pub model_type: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aibom: Option<AibomDocument>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub aibom_ref: String,
    /// AIBOM field paths implicated by the flaw.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<String>,
}

impl AiSystem {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffectedProduct {
    pub display_name: String,
    pub identifier: ProductIdentifier,
}

/// A mitigation reference: a catalog entry, a narrative, or both.
///
/// `none_known` records that no mitigation exists yet; such an entry must be
/// the only one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog_ref: Option<MitigationId>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub narrative: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub none_known: bool,
}

impl MitigationRef {
    pub fn catalog(id: MitigationId) -> Self {
        Self {
            catalog_ref: Some(id),
            ..Self::default()
        }
    }

    pub fn narrative(text: impl Into<String>) -> Self {
        Self {
            narrative: text.into(),
            ..Self::default()
        }
    }

    pub fn none_known() -> Self {
        Self {
            none_known: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VulnerabilityRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<AiCveId>,
    #[serde(default, skip_serializing_if = "AiSystem::is_empty")]
    pub ai_system: AiSystem,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weaknesses: Vec<AiCweId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub root_causes: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub impact: String,
    #[serde(default, skip_serializing_if = "SeverityAssessment::is_empty")]
    pub severity: SeverityAssessment,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub affected_products: Vec<AffectedProduct>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploitability: Option<ExploitabilityProfile>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mitigations: Vec<MitigationRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<Reference>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_date: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub reported_by: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vendors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<LifecycleStatus>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub status_history: Vec<StatusChange>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub extensions: Map<String, Value>,
}

impl VulnerabilityRecord {
    pub fn current_score(&self) -> Option<&SeverityScore> {
        self.severity.current()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("malformed record document: {0}")]
    MalformedDocument(String),
    #[error("field {path} has the wrong shape: {message}")]
    BadFieldType { path: String, message: String },
    #[error(transparent)]
    BadId(#[from] IdError),
}

impl RecordError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::MalformedDocument(_) => "MALFORMED_DOCUMENT",
            Self::BadFieldType { .. } => "BAD_FIELD_TYPE",
            Self::BadId(_) => "BAD_ID",
        }
    }
}

pub fn parse_record(text: &str) -> Result<VulnerabilityRecord, RecordError> {
    let value: Value = serde_json::from_str(text).map_err(|e| RecordError::MalformedDocument(e.to_string()))?;
    record_from_value(value)
}

/// Decodes a record from a JSON value. Unknown top-level keys are moved into
/// `extensions`; an explicit `extensions` entry wins on a name clash.
pub fn record_from_value(value: Value) -> Result<VulnerabilityRecord, RecordError> {
    let Value::Object(map) = value else {
        return Err(RecordError::MalformedDocument("expected a JSON object".into()));
    };
    if let Some(Value::String(id)) = map.get("id") {
        id.parse::<AiCveId>()?;
    }
    let mut known = Map::new();
    let mut unknown = Map::new();
    for (key, value) in map {
        if RECORD_KEYS.contains(&key.as_str()) {
            known.insert(key, value);
        } else {
            unknown.insert(key, value);
        }
    }
    let mut record: VulnerabilityRecord =
        serde_path_to_error::deserialize(Value::Object(known)).map_err(|e| RecordError::BadFieldType {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    for (key, value) in unknown {
        record.extensions.entry(key).or_insert(value);
    }
    Ok(record)
}

/// Canonical bytes: fixed key order, populated fields only, two-space
/// indentation and a trailing newline.
pub fn serialize_record(record: &VulnerabilityRecord) -> String {
    serde_json::to_string_pretty(record).expect("records serialize") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let text = r#"{
            "description": "Model leaks training membership.",
            "report_date": "2024-03-25",
            "reported_by": "A. Researcher",
            "ai_system": {"name": "Demo API", "type": "CNN"}
        }"#;
        let record = parse_record(text).unwrap();
        assert_eq!(record.reported_by, "A. Researcher");
        assert_eq!(record.ai_system.model_type, "CNN");
        assert!(record.id.is_none() && record.weaknesses.is_empty() && record.severity.is_empty());
        assert_eq!(
            serialize_record(&record),
            "{\n  \"ai_system\": {\n    \"name\": \"Demo API\",\n    \"type\": \"CNN\"\n  },\n  \
             \"description\": \"Model leaks training membership.\",\n  \"report_date\": \"2024-03-25\",\n  \
             \"reported_by\": \"A. Researcher\"\n}\n"
        );
    }

    #[test]
    fn id_grammar_is_enforced() {
        let err = parse_record(r#"{"id": "CVE-2024-1234"}"#).unwrap_err();
        assert_eq!(err.code(), "BAD_ID");
        let err = parse_record(r#"{"id": 7}"#).unwrap_err();
        assert_eq!(err.code(), "BAD_FIELD_TYPE");
    }

    #[test]
    fn shape_errors_carry_the_path() {
        let err = parse_record(r#"{"affected_products": [{"display_name": "x", "identifier": 5}]}"#).unwrap_err();
        match err {
            RecordError::BadFieldType { path, .. } => assert_eq!(path, "affected_products[0].identifier"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse_record("[1]").unwrap_err().code(), "MALFORMED_DOCUMENT");
        assert_eq!(parse_record("{").unwrap_err().code(), "MALFORMED_DOCUMENT");
        assert_eq!(parse_record(r#"{"vendors": "x"}"#).unwrap_err().code(), "BAD_FIELD_TYPE");
    }

    #[test]
    fn unknown_keys_are_kept_as_extensions() {
        let record = parse_record(r#"{"description": "d", "triage_queue": {"lane": 2}, "extensions": {"a": [1]}}"#)
            .unwrap();
        assert_eq!(record.extensions.keys().collect::<Vec<_>>(), ["a", "triage_queue"]);
        let again = parse_record(&serialize_record(&record)).unwrap();
        assert_eq!(again, record);
        assert!(serialize_record(&record).contains("\"extensions\": {\n    \"a\": [\n      1\n    ],\n    \"triage_queue\""));
    }
}
