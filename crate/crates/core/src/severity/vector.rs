//! Severity vectors and their `AIVSS:1.0/...` string grammar.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const VECTOR_PREFIX: &str = "AIVSS:1.0";

macro_rules! metric_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident = $code:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn code(self) -> &'static str {
                match self {
                    $($name::$variant => $code),+
                }
            }

            pub fn from_code(code: &str) -> Option<Self> {
                match code {
                    $($code => Some($name::$variant),)+
                    _ => None,
                }
            }
        }
    };
}

metric_enum!(AttackVector { Network = "N", Adjacent = "A", Local = "L", Physical = "P" });
metric_enum!(AttackComplexity { Low = "L", High = "H" });
metric_enum!(PrivilegesRequired { None = "N", Low = "L", High = "H" });
metric_enum!(UserInteraction { None = "N", Required = "R" });
metric_enum!(Scope { Unchanged = "U", Changed = "C" });
metric_enum!(
    /// Magnitude shared by the CIA metrics and the four AI metrics.
    Impact { High = "H", Low = "L", None = "N" }
);
metric_enum!(Safety { Present = "P", Negligible = "N" });
metric_enum!(Automatable { Yes = "Y", No = "N" });
metric_enum!(Recovery { Automatic = "A", User = "U", Irrecoverable = "I" });
metric_enum!(ValueDensity { Diffuse = "D", Concentrated = "C" });

impl AttackVector {
    pub fn weight(self) -> f64 {
        match self {
            Self::Network => 0.85,
            Self::Adjacent => 0.62,
            Self::Local => 0.55,
            Self::Physical => 0.20,
        }
    }
}

impl AttackComplexity {
    pub fn weight(self) -> f64 {
        match self {
            Self::Low => 0.77,
            Self::High => 0.44,
        }
    }
}

impl PrivilegesRequired {
    pub fn weight(self, scope: Scope) -> f64 {
        match (self, scope) {
            (Self::None, _) => 0.85,
            (Self::Low, Scope::Unchanged) => 0.62,
            (Self::Low, Scope::Changed) => 0.68,
            (Self::High, Scope::Unchanged) => 0.27,
            (Self::High, Scope::Changed) => 0.50,
        }
    }
}

impl UserInteraction {
    pub fn weight(self) -> f64 {
        match self {
            Self::None => 0.85,
            Self::Required => 0.62,
        }
    }
}

impl Impact {
    pub fn weight(self) -> f64 {
        match self {
            Self::High => 0.56,
            Self::Low => 0.22,
            Self::None => 0.0,
        }
    }
}

/// Contextual labels that never enter the numeric score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Supplemental {
    pub safety: Option<Safety>,
    pub automatable: Option<Automatable>,
    pub recovery: Option<Recovery>,
    pub value_density: Option<ValueDensity>,
}

/// The full set of scoring metrics for one vulnerability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeverityVector {
    pub av: AttackVector,
    pub ac: AttackComplexity,
    pub pr: PrivilegesRequired,
    pub ui: UserInteraction,
    pub scope: Scope,
    pub c: Impact,
    pub i: Impact,
    pub a: Impact,
    /// Susceptibility to data poisoning.
    pub dp: Impact,
    /// Model inversion / membership inference exposure.
    pub mi: Impact,
    /// Sensitivity to adversarial examples.
    pub ae: Impact,
    /// Fragility under distribution shift.
    pub ds: Impact,
    pub supplemental: Supplemental,
}

impl SeverityVector {
    /// The vector with every AI metric set to `None`.
    pub fn without_ai(&self) -> Self {
        Self {
            dp: Impact::None,
            mi: Impact::None,
            ae: Impact::None,
            ds: Impact::None,
            ..*self
        }
    }

    pub fn ai_metrics(&self) -> [Impact; 4] {
        [self.dp, self.mi, self.ae, self.ds]
    }

    pub fn cia_metrics(&self) -> [Impact; 3] {
        [self.c, self.i, self.a]
    }
}

/// Metric keys in canonical rendering order.
pub const SCORING_METRICS: [&str; 12] = [
    "AV", "AC", "PR", "UI", "S", "C", "I", "A", "DP", "MI", "AE", "DS",
];
pub const SUPPLEMENTAL_METRICS: [&str; 4] = ["SF", "AU", "RE", "VD"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VectorError {
    #[error("vector must start with {VECTOR_PREFIX:?}")]
    BadPrefix,
    #[error("missing metric {0}")]
    MissingMetric(&'static str),
    #[error("metric {0} appears more than once")]
    DuplicateMetric(String),
    #[error("bad metric component {0:?}")]
    BadMetricValue(String),
}

impl VectorError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::BadPrefix => "BAD_PREFIX",
            Self::MissingMetric(_) => "MISSING_METRIC",
            Self::DuplicateMetric(_) => "DUPLICATE_METRIC",
            Self::BadMetricValue(_) => "BAD_METRIC_VALUE",
        }
    }
}

/// Any subset of the twelve scoring metrics; used for environmental overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PartialVector {
    pub av: Option<AttackVector>,
    pub ac: Option<AttackComplexity>,
    pub pr: Option<PrivilegesRequired>,
    pub ui: Option<UserInteraction>,
    pub scope: Option<Scope>,
    pub c: Option<Impact>,
    pub i: Option<Impact>,
    pub a: Option<Impact>,
    pub dp: Option<Impact>,
    pub mi: Option<Impact>,
    pub ae: Option<Impact>,
    pub ds: Option<Impact>,
}

impl PartialVector {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    /// Applies every present metric on top of `base`.
    pub fn overlay(&self, base: &SeverityVector) -> SeverityVector {
        SeverityVector {
            av: self.av.unwrap_or(base.av),
            ac: self.ac.unwrap_or(base.ac),
            pr: self.pr.unwrap_or(base.pr),
            ui: self.ui.unwrap_or(base.ui),
            scope: self.scope.unwrap_or(base.scope),
            c: self.c.unwrap_or(base.c),
            i: self.i.unwrap_or(base.i),
            a: self.a.unwrap_or(base.a),
            dp: self.dp.unwrap_or(base.dp),
            mi: self.mi.unwrap_or(base.mi),
            ae: self.ae.unwrap_or(base.ae),
            ds: self.ds.unwrap_or(base.ds),
            supplemental: base.supplemental,
        }
    }

    /// Sets one metric from its key and value code. Rejects duplicates.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), VectorError> {
        let bad = || VectorError::BadMetricValue(format!("{key}:{value}"));
        fn put<T>(slot: &mut Option<T>, key: &str, v: Option<T>, bad: impl Fn() -> VectorError) -> Result<(), VectorError> {
            if slot.is_some() {
                return Err(VectorError::DuplicateMetric(key.to_string()));
            }
            *slot = Some(v.ok_or_else(bad)?);
            Ok(())
        }
        match key {
            "AV" => put(&mut self.av, key, AttackVector::from_code(value), bad),
            "AC" => put(&mut self.ac, key, AttackComplexity::from_code(value), bad),
            "PR" => put(&mut self.pr, key, PrivilegesRequired::from_code(value), bad),
            "UI" => put(&mut self.ui, key, UserInteraction::from_code(value), bad),
            "S" => put(&mut self.scope, key, Scope::from_code(value), bad),
            "C" => put(&mut self.c, key, Impact::from_code(value), bad),
            "I" => put(&mut self.i, key, Impact::from_code(value), bad),
            "A" => put(&mut self.a, key, Impact::from_code(value), bad),
            "DP" => put(&mut self.dp, key, Impact::from_code(value), bad),
            "MI" => put(&mut self.mi, key, Impact::from_code(value), bad),
            "AE" => put(&mut self.ae, key, Impact::from_code(value), bad),
            "DS" => put(&mut self.ds, key, Impact::from_code(value), bad),
            _ => Err(bad()),
        }
    }

    /// Present metrics as `(key, code)` pairs in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, &'static str)> {
        let codes = [
            self.av.map(AttackVector::code),
            self.ac.map(AttackComplexity::code),
            self.pr.map(PrivilegesRequired::code),
            self.ui.map(UserInteraction::code),
            self.scope.map(Scope::code),
            self.c.map(Impact::code),
            self.i.map(Impact::code),
            self.a.map(Impact::code),
            self.dp.map(Impact::code),
            self.mi.map(Impact::code),
            self.ae.map(Impact::code),
            self.ds.map(Impact::code),
        ];
        SCORING_METRICS
            .iter()
            .zip(codes)
            .filter_map(|(k, c)| c.map(|c| (*k, c)))
            .collect()
    }

    fn complete(self) -> Result<SeverityVector, VectorError> {
        Ok(SeverityVector {
            av: self.av.ok_or(VectorError::MissingMetric("AV"))?,
            ac: self.ac.ok_or(VectorError::MissingMetric("AC"))?,
            pr: self.pr.ok_or(VectorError::MissingMetric("PR"))?,
            ui: self.ui.ok_or(VectorError::MissingMetric("UI"))?,
            scope: self.scope.ok_or(VectorError::MissingMetric("S"))?,
            c: self.c.ok_or(VectorError::MissingMetric("C"))?,
            i: self.i.ok_or(VectorError::MissingMetric("I"))?,
            a: self.a.ok_or(VectorError::MissingMetric("A"))?,
            dp: self.dp.ok_or(VectorError::MissingMetric("DP"))?,
            mi: self.mi.ok_or(VectorError::MissingMetric("MI"))?,
            ae: self.ae.ok_or(VectorError::MissingMetric("AE"))?,
            ds: self.ds.ok_or(VectorError::MissingMetric("DS"))?,
            supplemental: Supplemental::default(),
        })
    }
}

/// Parses a vector string. Metric order after the prefix is free.
pub fn parse_vector(text: &str) -> Result<SeverityVector, VectorError> {
    let mut parts = text.trim().split('/');
    if parts.next() != Some(VECTOR_PREFIX) {
        return Err(VectorError::BadPrefix);
    }
    let mut scoring = PartialVector::default();
    let mut supplemental = Supplemental::default();
    for part in parts {
        let (key, value) = part
            .split_once(':')
            .ok_or_else(|| VectorError::BadMetricValue(part.to_string()))?;
        let bad = || VectorError::BadMetricValue(part.to_string());
        match key {
            "SF" => set_once(&mut supplemental.safety, key, Safety::from_code(value).ok_or_else(bad)?)?,
            "AU" => set_once(
                &mut supplemental.automatable,
                key,
                Automatable::from_code(value).ok_or_else(bad)?,
            )?,
            "RE" => set_once(&mut supplemental.recovery, key, Recovery::from_code(value).ok_or_else(bad)?)?,
            "VD" => set_once(
                &mut supplemental.value_density,
                key,
                ValueDensity::from_code(value).ok_or_else(bad)?,
            )?,
            _ => scoring.set(key, value)?,
        }
    }
    let mut vector = scoring.complete()?;
    vector.supplemental = supplemental;
    Ok(vector)
}

fn set_once<T>(slot: &mut Option<T>, key: &str, value: T) -> Result<(), VectorError> {
    if slot.is_some() {
        return Err(VectorError::DuplicateMetric(key.to_string()));
    }
    *slot = Some(value);
    Ok(())
}

impl fmt::Display for SeverityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{VECTOR_PREFIX}/AV:{}/AC:{}/PR:{}/UI:{}/S:{}/C:{}/I:{}/A:{}/DP:{}/MI:{}/AE:{}/DS:{}",
            self.av.code(),
            self.ac.code(),
            self.pr.code(),
            self.ui.code(),
            self.scope.code(),
            self.c.code(),
            self.i.code(),
            self.a.code(),
            self.dp.code(),
            self.mi.code(),
            self.ae.code(),
            self.ds.code(),
        )?;
        let s = &self.supplemental;
        if let Some(v) = s.safety {
            write!(f, "/SF:{}", v.code())?;
        }
        if let Some(v) = s.automatable {
            write!(f, "/AU:{}", v.code())?;
        }
        if let Some(v) = s.recovery {
            write!(f, "/RE:{}", v.code())?;
        }
        if let Some(v) = s.value_density {
            write!(f, "/VD:{}", v.code())?;
        }
        Ok(())
    }
}

impl FromStr for SeverityVector {
    type Err = VectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_vector(s)
    }
}

impl Serialize for SeverityVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SeverityVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_vector(&text).map_err(de::Error::custom)
    }
}

impl Serialize for PartialVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let entries = self.entries();
        let mut map = serializer.serialize_map(Some(entries.len()))?;
        for (k, v) in entries {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for PartialVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = serde_json::Map::<String, serde_json::Value>::deserialize(deserializer)?;
        let mut partial = PartialVector::default();
        for (key, value) in raw {
            let code = value
                .as_str()
                .ok_or_else(|| de::Error::custom(format!("metric {key} must be a string code")))?;
            partial.set(&key, code).map_err(de::Error::custom)?;
        }
        Ok(partial)
    }
}
