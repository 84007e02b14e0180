use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ids::{AiCweId, MitigationId};
use crate::reference::Reference;
use crate::severity::Band;

/// The four root-cause classes of AI weaknesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WeaknessClass {
    ValidationMechanism,
    DataHandling,
    LearningAlgorithm,
    PrivacySafeguard,
}

impl WeaknessClass {
    pub const ALL: [WeaknessClass; 4] = [
        Self::ValidationMechanism,
        Self::DataHandling,
        Self::LearningAlgorithm,
        Self::PrivacySafeguard,
    ];

    pub fn description(self) -> &'static str {
        match self {
            Self::ValidationMechanism => {
                "Validation mechanisms are insufficient, letting malicious samples pass security checks and enter the system."
            }
            Self::DataHandling => {
                "Data handling lacks robust filtering and normalization, leaving data integrity exposed to noise and perturbations."
            }
            Self::LearningAlgorithm => {
                "The learning algorithm lacks resilience to crafted inputs that mislead or corrupt the learning process."
            }
            Self::PrivacySafeguard => {
                "Privacy safeguards such as encryption, anonymization or access control are deficient or absent."
            }
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let folded: String = text
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|c| format!("{c:?}").to_ascii_lowercase() == folded)
    }
}

impl fmt::Display for WeaknessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Inclusive range of bands typical for instances of a weakness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBandRange")]
pub struct BandRange {
    low: Band,
    high: Band,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBandRange {
    low: Band,
    high: Band,
}

impl TryFrom<RawBandRange> for BandRange {
    type Error = String;

    fn try_from(raw: RawBandRange) -> Result<Self, Self::Error> {
        BandRange::new(raw.low, raw.high).ok_or_else(|| format!("band range {} > {}", raw.low, raw.high))
    }
}

impl BandRange {
    pub fn new(low: Band, high: Band) -> Option<Self> {
        (low <= high).then_some(Self { low, high })
    }

    pub fn low(&self) -> Band {
        self.low
    }

    pub fn high(&self) -> Band {
        self.high
    }

    pub fn contains(&self, band: Band) -> bool {
        self.low <= band && band <= self.high
    }
}

impl fmt::Display for BandRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.low == self.high {
            write!(f, "{}", self.low)
        } else {
            write!(f, "{} to {}", self.low, self.high)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationshipKind {
    ParentOf,
    ChildOf,
    RelatedTo,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relationship {
    pub target: AiCweId,
    pub kind: RelationshipKind,
}

/// Lifecycle stage at which a weakness enters a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntroductionMode {
    DataCollection,
    Training,
    FineTuning,
    Inference,
    Deployment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AiCweEntry {
    pub id: AiCweId,
    pub name: String,
    pub weakness_class: WeaknessClass,
    pub description: String,
    #[serde(default)]
    pub examples: Vec<String>,
    pub severity_band: BandRange,
    #[serde(default)]
    pub common_consequence: String,
    #[serde(default)]
    pub relationships: Vec<Relationship>,
    #[serde(default)]
    pub modes_of_introduction: BTreeSet<IntroductionMode>,
    #[serde(default)]
    pub potential_mitigations: Vec<MitigationId>,
    #[serde(default)]
    pub references: Vec<Reference>,
    /// Marks entries authored for the seed corpus rather than taken from a published source.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub seed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MitigationType {
    /// Applied before or during training.
    Proactive,
    Reactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Data,
    Model,
    System,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationEntry {
    pub id: MitigationId,
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub effect: String,
    #[serde(rename = "type")]
    pub kind: MitigationType,
    #[serde(default)]
    pub tactic: String,
    pub orientation: Orientation,
    #[serde(default)]
    pub target_weaknesses: Vec<AiCweId>,
    #[serde(default)]
    pub target_attacks: Vec<String>,
    #[serde(default)]
    pub pros: Vec<String>,
    #[serde(default)]
    pub cons: Vec<String>,
    #[serde(default)]
    pub references: Vec<Reference>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub seed: bool,
}
