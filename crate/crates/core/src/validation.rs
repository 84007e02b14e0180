//! Findings produced by record and AIBOM validation.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Lifecycle-stage rule set used when validating a record.
///
/// Profiles are nested: every rule of `Submission` is also a rule of
/// `Triage`, and every rule of `Triage` is also a rule of `Disclosure`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ValidationProfile {
    Submission,
    Triage,
    Disclosure,
}

impl ValidationProfile {
    pub const ALL: [ValidationProfile; 3] = [Self::Submission, Self::Triage, Self::Disclosure];

    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "submission" => Some(Self::Submission),
            "triage" => Some(Self::Triage),
            "disclosure" => Some(Self::Disclosure),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub code: String,
    pub path: String,
    pub message: String,
    pub level: Level,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.level {
            Level::Error => "error",
            Level::Warning => "warning",
        };
        write!(f, "{level} {} at {}: {}", self.code, self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Absent for documents that are not validated against a lifecycle stage (AIBOMs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ValidationProfile>,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn new(profile: Option<ValidationProfile>) -> Self {
        Self {
            profile,
            findings: Vec::new(),
        }
    }

    pub fn error(&mut self, code: &str, path: impl Into<String>, message: impl Into<String>) {
        self.push(code, path, message, Level::Error);
    }

    pub fn warning(&mut self, code: &str, path: impl Into<String>, message: impl Into<String>) {
        self.push(code, path, message, Level::Warning);
    }

    fn push(&mut self, code: &str, path: impl Into<String>, message: impl Into<String>, level: Level) {
        self.findings.push(Finding {
            code: code.to_string(),
            path: path.into(),
            message: message.into(),
            level,
        });
    }

    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.level == Level::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.level == Level::Warning)
    }

    pub fn has_error(&self, code: &str, path: &str) -> bool {
        self.errors().any(|f| f.code == code && f.path == path)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.findings.is_empty() {
            return write!(f, "valid");
        }
        let status = if self.is_valid() { "valid" } else { "invalid" };
        write!(f, "{status}")?;
        for finding in &self.findings {
            write!(f, "\n  {finding}")?;
        }
        Ok(())
    }
}
