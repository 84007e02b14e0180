//! Identifier newtypes shared across the record, catalog and registry layers.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const CVE_PREFIX: &str = "AI-CVE-";
const CWE_PREFIX: &str = "AI-CWE-";
const MIT_PREFIX: &str = "MIT-";

/// Rejected identifier text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {kind} identifier {text:?}: {reason}")]
pub struct IdError {
    pub kind: &'static str,
    pub text: String,
    pub reason: &'static str,
}

impl IdError {
    pub fn code(&self) -> &'static str {
        "BAD_ID"
    }

    fn new(kind: &'static str, text: &str, reason: &'static str) -> Self {
        Self {
            kind,
            text: text.to_string(),
            reason,
        }
    }
}

/// Identifier of one recorded AI vulnerability, rendered `AI-CVE-<year>-<serial>`.
///
/// The serial is zero-padded to at least four digits. Ordering is by
/// `(year, serial)`, which matches the lexical order of the canonical form
/// only while serials stay below 10000.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AiCveId {
    year: u16,
    serial: u32,
}

impl AiCveId {
    pub const MIN_YEAR: u16 = 1999;
    pub const MAX_YEAR: u16 = 9999;

    pub fn new(year: u16, serial: u32) -> Result<Self, IdError> {
        let shown = format!("{year}-{serial}");
        if !(Self::MIN_YEAR..=Self::MAX_YEAR).contains(&year) {
            return Err(IdError::new("AI-CVE", &shown, "year out of range"));
        }
        if serial == 0 {
            return Err(IdError::new("AI-CVE", &shown, "serial must be positive"));
        }
        Ok(Self { year, serial })
    }

    pub fn year(&self) -> u16 {
        self.year
    }

    pub fn serial(&self) -> u32 {
        self.serial
    }
}

impl fmt::Display for AiCveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{CVE_PREFIX}{}-{:04}", self.year, self.serial)
    }
}

impl FromStr for AiCveId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| IdError::new("AI-CVE", s, reason);
        let rest = s
            .strip_prefix(CVE_PREFIX)
            .ok_or_else(|| err("missing AI-CVE- prefix"))?;
        let (year, serial) = rest
            .split_once('-')
            .ok_or_else(|| err("expected <year>-<serial>"))?;
        if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("year must be four digits"));
        }
        if serial.len() < 4 || !serial.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("serial must be at least four digits"));
        }
        let year_n: u16 = year.parse().map_err(|_| err("bad year"))?;
        let serial_n: u32 = serial.parse().map_err(|_| err("serial too large"))?;
        // Rejects redundant padding such as 00001, which would break round-tripping.
        if format!("{serial_n:04}") != serial {
            return Err(err("serial is not canonically padded"));
        }
        Self::new(year_n, serial_n).map_err(|e| IdError { text: s.to_string(), ..e })
    }
}

/// Identifier of an AI-CWE weakness entry (`AI-CWE-<n>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AiCweId(u32);

impl AiCweId {
    pub fn new(number: u32) -> Result<Self, IdError> {
        if number == 0 {
            return Err(IdError::new("AI-CWE", "0", "number must be positive"));
        }
        Ok(Self(number))
    }

    pub fn number(&self) -> u32 {
        self.0
    }
}

impl fmt::Display for AiCweId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{CWE_PREFIX}{}", self.0)
    }
}

impl FromStr for AiCweId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = parse_plain_number(s, CWE_PREFIX).map_err(|r| IdError::new("AI-CWE", s, r))?;
        Self::new(n).map_err(|_| IdError::new("AI-CWE", s, "number must be positive"))
    }
}

/// Identifier of a mitigation technique, rendered `MIT-NNNN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MitigationId(u32);

impl MitigationId {
    pub fn new(number: u32) -> Result<Self, IdError> {
        if number == 0 {
            return Err(IdError::new("MIT", "0", "number must be positive"));
        }
        Ok(Self(number))
    }

    pub fn number(&self) -> u32 {
        self.0
    }
}

impl fmt::Display for MitigationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{MIT_PREFIX}{:04}", self.0)
    }
}

impl FromStr for MitigationId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix(MIT_PREFIX)
            .ok_or_else(|| IdError::new("MIT", s, "missing MIT- prefix"))?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(IdError::new("MIT", s, "expected digits"));
        }
        let n: u32 = digits
            .parse()
            .map_err(|_| IdError::new("MIT", s, "number too large"))?;
        Self::new(n).map_err(|_| IdError::new("MIT", s, "number must be positive"))
    }
}

fn parse_plain_number(s: &str, prefix: &str) -> Result<u32, &'static str> {
    let digits = s.strip_prefix(prefix).ok_or("missing prefix")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err("expected digits");
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return Err("leading zeros are not canonical");
    }
    digits.parse().map_err(|_| "number too large")
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let text = String::deserialize(deserializer)?;
                text.parse().map_err(de::Error::custom)
            }
        }
    };
}

string_serde!(AiCveId);
string_serde!(AiCweId);
string_serde!(MitigationId);
