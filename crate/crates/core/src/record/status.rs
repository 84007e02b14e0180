use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// Disclosure lifecycle of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LifecycleStatus {
    Reported,
    Triaged,
    Confirmed,
    Disclosed,
    Mitigated,
    Resolved,
    Rejected,
    Deferred,
}

impl LifecycleStatus {
    pub const ALL: [LifecycleStatus; 8] = [
        Self::Reported,
        Self::Triaged,
        Self::Confirmed,
        Self::Disclosed,
        Self::Mitigated,
        Self::Resolved,
        Self::Rejected,
        Self::Deferred,
    ];

    pub fn successors(self) -> &'static [LifecycleStatus] {
        use LifecycleStatus::*;
        match self {
            Reported => &[Triaged, Rejected],
            Triaged => &[Confirmed, Rejected, Deferred],
            Deferred => &[Triaged],
            Confirmed => &[Disclosed, Rejected],
            Disclosed => &[Mitigated],
            Mitigated => &[Resolved],
            Rejected | Resolved => &[],
        }
    }

    pub fn can_transition_to(self, to: LifecycleStatus) -> bool {
        self.successors().contains(&to)
    }

    pub fn is_terminal(self) -> bool {
        self.successors().is_empty()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Reported => "Reported",
            Self::Triaged => "Triaged",
            Self::Confirmed => "Confirmed",
            Self::Disclosed => "Disclosed",
            Self::Mitigated => "Mitigated",
            Self::Resolved => "Resolved",
            Self::Rejected => "Rejected",
            Self::Deferred => "Deferred",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.as_str().eq_ignore_ascii_case(text.trim()))
    }
}

impl fmt::Display for LifecycleStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One applied transition, as kept on the record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatusChange {
    pub from: LifecycleStatus,
    pub to: LifecycleStatus,
    pub actor: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub at: DateTime<Utc>,
}
