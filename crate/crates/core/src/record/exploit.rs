use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TechnicalComplexity {
    Low,
    Medium,
    High,
}

/// Access an attacker needs before the flaw can be exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PrivilegeLevel {
    None,
    User,
    ModelQueryAccess,
    TrainingDataAccess,
    Administrative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploitabilityProfile {
    pub technical_complexity: TechnicalComplexity,
    pub privilege_level: PrivilegeLevel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub required_actions: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub access_requirements: String,
}
