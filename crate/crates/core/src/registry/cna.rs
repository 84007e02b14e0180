use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YearRange {
    pub from: u16,
    pub to: u16,
}

impl YearRange {
    pub fn contains(&self, year: u16) -> bool {
        self.from <= year && year <= self.to
    }
}

/// An organization authorized to assign AI-CVE ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnaRegistration {
    pub cna_id: String,
    pub name: String,
    pub allowed_year_range: YearRange,
}

/// Lowercase ASCII letters, digits and inner hyphens.
pub fn is_valid_slug(slug: &str) -> bool {
    !slug.is_empty()
        && !slug.starts_with('-')
        && !slug.ends_with('-')
        && slug
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert!(is_valid_slug("test-cna"));
        assert!(is_valid_slug("mitre2"));
        for bad in ["", "-x", "x-", "Test", "a b", "a_b"] {
            assert!(!is_valid_slug(bad), "{bad}");
        }
    }
}
