use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad product identifier {text:?}: {reason}")]
pub struct ProductError {
    pub text: String,
    pub reason: &'static str,
}

impl ProductError {
    pub fn code(&self) -> &'static str {
        "BAD_PRODUCT_ID"
    }
}

/// Slash-separated product token such as `2024/google/cloud/ModelV01`.
///
/// The first segment is a four-digit year and the last names the model or
/// version. Matching ignores ASCII case; `original` keeps the reported text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductIdentifier {
    segments: Vec<String>,
    original: String,
}

pub const MIN_PRODUCT_SEGMENTS: usize = 3;
pub const MAX_PRODUCT_SEGMENTS: usize = 5;

fn split_segments(text: &str) -> Result<Vec<String>, ProductError> {
    let err = |reason| ProductError {
        text: text.to_string(),
        reason,
    };
    let segments: Vec<String> = text.trim().split('/').map(|s| s.trim().to_string()).collect();
    if segments.iter().any(String::is_empty) {
        return Err(err("empty segment"));
    }
    Ok(segments)
}

pub fn parse_product_id(text: &str) -> Result<ProductIdentifier, ProductError> {
    let err = |reason| ProductError {
        text: text.to_string(),
        reason,
    };
    let segments = split_segments(text)?;
    if !(MIN_PRODUCT_SEGMENTS..=MAX_PRODUCT_SEGMENTS).contains(&segments.len()) {
        return Err(err("expected 3 to 5 segments"));
    }
    let head = &segments[0];
    if head.len() != 4 || !head.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("first segment must be a four-digit year"));
    }
    Ok(ProductIdentifier {
        segments,
        original: text.to_string(),
    })
}

/// A leading run of 1 to 5 segments used to filter products.
pub fn parse_product_prefix(text: &str) -> Result<Vec<String>, ProductError> {
    let segments = split_segments(text)?;
    if segments.len() > MAX_PRODUCT_SEGMENTS {
        return Err(ProductError {
            text: text.to_string(),
            reason: "too many segments",
        });
    }
    Ok(segments)
}

impl ProductIdentifier {
    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn original(&self) -> &str {
        &self.original
    }

    pub fn year(&self) -> u16 {
        self.segments[0].parse().expect("validated year segment")
    }

    pub fn has_prefix<S: AsRef<str>>(&self, prefix: &[S]) -> bool {
        prefix.len() <= self.segments.len()
            && prefix
                .iter()
                .zip(&self.segments)
                .all(|(p, s)| p.as_ref().eq_ignore_ascii_case(s))
    }

    pub fn matches(&self, other: &ProductIdentifier) -> bool {
        self.segments.len() == other.segments.len() && self.has_prefix(&other.segments)
    }
}

impl fmt::Display for ProductIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("/"))
    }
}

impl FromStr for ProductIdentifier {
    type Err = ProductError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_product_id(s)
    }
}

impl Serialize for ProductIdentifier {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.original)
    }
}

impl<'de> Deserialize<'de> for ProductIdentifier {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_product_id(&text).map_err(de::Error::custom)
    }
}
