use std::fmt;

use chrono::{DateTime, Utc};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::vector::SeverityVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("score {0} is outside 0.0..=10.0 or has more than one fractional digit")]
    OutOfRange(String),
    #[error("reassessment at {at} precedes the latest entry at {last}")]
    ClockRegression { last: DateTime<Utc>, at: DateTime<Utc> },
}

impl ScoreError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::OutOfRange(_) => "OUT_OF_RANGE",
            Self::ClockRegression { .. } => "CLOCK_REGRESSION",
        }
    }
}

/// A score in `0.0..=10.0` with exactly one fractional digit, stored as tenths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ScoreValue(u8);

impl ScoreValue {
    pub const ZERO: ScoreValue = ScoreValue(0);
    pub const MAX: ScoreValue = ScoreValue(100);

    pub fn from_tenths(tenths: u8) -> Result<Self, ScoreError> {
        if tenths > 100 {
            return Err(ScoreError::OutOfRange(format!("{}.{}", tenths / 10, tenths % 10)));
        }
        Ok(Self(tenths))
    }

    /// Accepts only values that are already on the one-decimal grid.
    pub fn from_f64(value: f64) -> Result<Self, ScoreError> {
        let out_of_range = || ScoreError::OutOfRange(value.to_string());
        if !value.is_finite() || !(0.0..=10.0).contains(&value) {
            return Err(out_of_range());
        }
        let tenths = (value * 10.0).round();
        if (tenths - value * 10.0).abs() > 1e-9 {
            return Err(out_of_range());
        }
        Self::from_tenths(tenths as u8)
    }

    pub fn tenths(self) -> u8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 10.0
    }

    pub fn band(self) -> Band {
        match self.0 {
            0 => Band::None,
            1..=39 => Band::Low,
            40..=69 => Band::Medium,
            70..=89 => Band::High,
            _ => Band::Critical,
        }
    }
}

impl fmt::Display for ScoreValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

impl Serialize for ScoreValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for ScoreValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Self::from_f64(value).map_err(de::Error::custom)
    }
}

/// Qualitative severity rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Band {
    None,
    Low,
    Medium,
    High,
    Critical,
}

impl Band {
    pub const ALL: [Band; 5] = [Band::None, Band::Low, Band::Medium, Band::High, Band::Critical];

    pub fn as_str(self) -> &'static str {
        match self {
            Band::None => "None",
            Band::Low => "Low",
            Band::Medium => "Medium",
            Band::High => "High",
            Band::Critical => "Critical",
        }
    }

    pub fn parse(text: &str) -> Option<Band> {
        Self::ALL.into_iter().find(|b| b.as_str().eq_ignore_ascii_case(text))
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Maps a one-decimal score onto its band.
pub fn rating(value: f64) -> Result<Band, ScoreError> {
    ScoreValue::from_f64(value).map(ScoreValue::band)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeverityScore")]
pub struct SeverityScore {
    pub value: ScoreValue,
    pub band: Band,
    pub vector: SeverityVector,
    pub computed_at: DateTime<Utc>,
}

impl SeverityScore {
    pub fn new(value: ScoreValue, vector: SeverityVector, computed_at: DateTime<Utc>) -> Self {
        Self {
            value,
            band: value.band(),
            vector,
            computed_at,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeverityScore {
    value: ScoreValue,
    band: Band,
    vector: SeverityVector,
    computed_at: DateTime<Utc>,
}

impl TryFrom<RawSeverityScore> for SeverityScore {
    type Error = String;

    fn try_from(raw: RawSeverityScore) -> Result<Self, Self::Error> {
        if raw.value.band() != raw.band {
            return Err(format!("band {} does not contain score {}", raw.band, raw.value));
        }
        Ok(Self::new(raw.value, raw.vector, raw.computed_at))
    }
}
