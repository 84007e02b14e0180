use serde::{Deserialize, Serialize};

use super::vector::PartialVector;

/// Security requirement of the deploying organisation for one impact group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Requirement {
    Low,
    #[default]
    Medium,
    High,
}

impl Requirement {
    pub fn multiplier(self) -> f64 {
        match self {
            Requirement::Low => 0.5,
            Requirement::Medium => 1.0,
            Requirement::High => 1.5,
        }
    }
}

/// Deployment-specific adjustments. The default context leaves scores unchanged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentalContext {
    #[serde(default, skip_serializing_if = "PartialVector::is_empty")]
    pub overrides: PartialVector,
    #[serde(default)]
    pub cr: Requirement,
    #[serde(default)]
    pub ir: Requirement,
    #[serde(default)]
    pub ar: Requirement,
    /// Applies uniformly to DP, MI, AE and DS.
    #[serde(default)]
    pub air: Requirement,
}
