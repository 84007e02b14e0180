//! AI-adapted severity scoring.
//!
//! Scores are computed from a [`SeverityVector`] with the CVSS v3.1 base
//! arithmetic plus an AI impact group (data poisoning, model inversion,
//! adversarial examples, distribution shift). Supplemental labels travel with
//! the vector but never change the number.

mod environmental;
mod formula;
mod history;
mod score;
mod vector;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use environmental::{EnvironmentalContext, Requirement};
pub use formula::{roundup, roundup_tenths, Formula, DEFAULT_AI_COUPLING, ENVIRONMENTAL_ISC_CAP};
pub use history::{HistoryEntry, ScoreHistory, Trigger};
pub use score::{rating, Band, ScoreError, ScoreValue, SeverityScore};
pub use vector::{
    parse_vector, AttackComplexity, AttackVector, Automatable, Impact, PartialVector, PrivilegesRequired,
    Recovery, Safety, Scope, SeverityVector, Supplemental, UserInteraction, ValueDensity, VectorError,
    SCORING_METRICS, SUPPLEMENTAL_METRICS, VECTOR_PREFIX,
};

/// Scores `v` with the default coupling on f64.
pub fn compute_score(v: &SeverityVector, at: DateTime<Utc>) -> SeverityScore {
    SeverityScore::new(Formula::<f64>::default().score(v), *v, at)
}

/// Scores `v` under a deployment context. The returned snapshot carries the
/// effective vector, i.e. with overrides applied.
pub fn apply_environmental(v: &SeverityVector, env: &EnvironmentalContext, at: DateTime<Utc>) -> SeverityScore {
    let value = Formula::<f64>::default().score_environmental(v, env);
    SeverityScore::new(value, env.overrides.overlay(v), at)
}

/// Appends a fresh assessment of `v` to `history`, leaving the input untouched.
pub fn reassess(
    history: &ScoreHistory,
    v: &SeverityVector,
    trigger: Trigger,
    note: impl Into<String>,
    at: DateTime<Utc>,
) -> Result<ScoreHistory, ScoreError> {
    history.appended(HistoryEntry {
        score: compute_score(v, at),
        trigger,
        note: note.into(),
    })
}

/// Minimum Element 6 as stored on a record.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeverityAssessment {
    #[serde(default, skip_serializing_if = "ScoreHistory::is_empty")]
    pub history: ScoreHistory,
    /// Free-text justification accompanying the number.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub rationale: String,
}

impl SeverityAssessment {
    pub fn current(&self) -> Option<&SeverityScore> {
        self.history.current()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty() && self.rationale.is_empty()
    }
}
