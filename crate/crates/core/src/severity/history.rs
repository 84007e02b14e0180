use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::score::{ScoreError, SeverityScore};

/// Why a vulnerability was (re)scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trigger {
    Initial,
    ModelUpdate,
    DataDrift,
    Scheduled,
    Manual,
}

impl Trigger {
    pub const ALL: [Trigger; 5] = [
        Trigger::Initial,
        Trigger::ModelUpdate,
        Trigger::DataDrift,
        Trigger::Scheduled,
        Trigger::Manual,
    ];

    /// Case-insensitive; `-` and `_` separators are ignored (`model-update`).
    pub fn parse(text: &str) -> Option<Trigger> {
        let folded: String = text
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|t| format!("{t:?}").to_ascii_lowercase() == folded)
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryEntry {
    pub score: SeverityScore,
    pub trigger: Trigger,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

/// Append-only trail of assessments; the last entry is the current score.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<HistoryEntry>", into = "Vec<HistoryEntry>")]
pub struct ScoreHistory {
    entries: Vec<HistoryEntry>,
}

impl ScoreHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[HistoryEntry] {
        &self.entries
    }

    pub fn current(&self) -> Option<&SeverityScore> {
        self.entries.last().map(|e| &e.score)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns a new history with `entry` appended.
    pub fn appended(&self, entry: HistoryEntry) -> Result<ScoreHistory, ScoreError> {
        if let Some(last) = self.current() {
            if entry.score.computed_at < last.computed_at {
                return Err(ScoreError::ClockRegression {
                    last: last.computed_at,
                    at: entry.score.computed_at,
                });
            }
        }
        let mut entries = self.entries.clone();
        entries.push(entry);
        Ok(ScoreHistory { entries })
    }

    pub fn last_timestamp(&self) -> Option<DateTime<Utc>> {
        self.current().map(|s| s.computed_at)
    }
}

impl TryFrom<Vec<HistoryEntry>> for ScoreHistory {
    type Error = String;

    fn try_from(entries: Vec<HistoryEntry>) -> Result<Self, Self::Error> {
        if entries
            .windows(2)
            .any(|w| w[1].score.computed_at < w[0].score.computed_at)
        {
            return Err("score history timestamps must be nondecreasing".to_string());
        }
        Ok(Self { entries })
    }
}

impl From<ScoreHistory> for Vec<HistoryEntry> {
    fn from(history: ScoreHistory) -> Self {
        history.entries
    }
}
