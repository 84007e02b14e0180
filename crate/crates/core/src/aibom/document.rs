use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AibomDocument {
    #[serde(default)]
    pub meta: MetaSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub consideration: ConsiderationSection,
    #[serde(default)]
    pub usage: UsageSection,
}

/// Identity, origin and authorization of the model.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaSection {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub generation_tool: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub creator: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certification: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub release_date: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub license: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelAvailability {
    Public,
    Restricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataAvailability {
    Public,
    Private,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dependency {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub version: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub availability: Option<ModelAvailability>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub foundation_model: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub additional_models: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub weights_ref: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scripts: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub hyperparameters: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub configurations: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub domain: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub training_process: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub software_requirements: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hardware_requirements: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub evaluation_process: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dependencies: Vec<Dependency>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub availability: Option<DataAvailability>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub collection_method: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preprocessing: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub input_output_format: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub quantitative_measures: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qualitative_measures: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub governance: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub annotation: String,
}

/// Free text with an optional figure; no unit is implied.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measure {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amount: Option<f64>,
}

impl Measure {
    pub fn is_empty(&self) -> bool {
        self.text.is_empty() && self.amount.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsiderationSection {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub ethical: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub environmental: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_usage: Option<Measure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carbon_footprint: Option<Measure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub risk: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mitigation: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub recommendation: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UsageSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intended: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub out_of_scope: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub malicious: Vec<String>,
}

/// Every leaf field of the document model, section by section.
pub const AIBOM_FIELDS: [&str; 38] = [
    "meta.generation_tool",
    "meta.creator",
    "meta.certification",
    "meta.release_date",
    "meta.license",
    "model.source",
    "model.availability",
    "model.foundation_model",
    "model.additional_models",
    "model.weights_ref",
    "model.scripts",
    "model.hyperparameters",
    "model.configurations",
    "model.domain",
    "model.training_process",
    "model.software_requirements",
    "model.hardware_requirements",
    "model.evaluation_process",
    "model.dependencies",
    "data.source",
    "data.availability",
    "data.collection_method",
    "data.preprocessing",
    "data.input_output_format",
    "data.quantitative_measures",
    "data.qualitative_measures",
    "data.governance",
    "data.annotation",
    "consideration.ethical",
    "consideration.environmental",
    "consideration.energy_usage",
    "consideration.carbon_footprint",
    "consideration.risk",
    "consideration.mitigation",
    "consideration.recommendation",
    "usage.intended",
    "usage.out_of_scope",
    "usage.malicious",
];

pub const AIBOM_SECTIONS: [&str; 5] = ["meta", "model", "data", "consideration", "usage"];
