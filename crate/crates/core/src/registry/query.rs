use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::ids::{AiCveId, AiCweId};
use crate::record::{parse_product_prefix, LifecycleStatus, VulnerabilityRecord};
use crate::severity::ScoreValue;

use super::state::RegistryState;

pub const DEFAULT_PAGE_SIZE: u32 = 20;

/// Conjunctive record filter. Absent criteria match everything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFilter {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakness: Option<AiCweId>,
    /// Leading product segments, matched case-insensitively.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vendor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<BTreeSet<LifecycleStatus>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_score: Option<ScoreValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_score: Option<ScoreValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<NaiveDate>,
    /// Substring of the description or the impact, ignoring case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub page: u32,
    pub page_size: u32,
}

impl Default for QueryFilter {
    fn default() -> Self {
        Self {
            weakness: None,
            product: None,
            vendor: None,
            status: None,
            min_score: None,
            max_score: None,
            from: None,
            to: None,
            text: None,
            page: 1,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }
}

fn contains_folded(haystack: &str, needle_lower: &str) -> bool {
    haystack.to_lowercase().contains(needle_lower)
}

impl QueryFilter {
    /// Returns a description of the first violated invariant, if any.
    pub fn check(&self) -> Result<(), String> {
        if self.page == 0 || self.page_size == 0 {
            return Err("page and page_size start at 1".into());
        }
        if let (Some(min), Some(max)) = (self.min_score, self.max_score) {
            if min > max {
                return Err(format!("min_score {min} exceeds max_score {max}"));
            }
        }
        if let (Some(from), Some(to)) = (self.from, self.to) {
            if from > to {
                return Err(format!("from {from} is after to {to}"));
            }
        }
        Ok(())
    }

    pub fn matches(&self, record: &VulnerabilityRecord) -> bool {
        if let Some(w) = self.weakness {
            if !record.weaknesses.contains(&w) {
                return false;
            }
        }
        if let Some(prefix) = &self.product {
            if !record.affected_products.iter().any(|p| p.identifier.has_prefix(prefix)) {
                return false;
            }
        }
        if let Some(vendor) = &self.vendor {
            let needle = vendor.to_lowercase();
            if !record.vendors.iter().any(|v| contains_folded(v, &needle)) {
                return false;
            }
        }
        if let Some(statuses) = &self.status {
            if !record.status.is_some_and(|s| statuses.contains(&s)) {
                return false;
            }
        }
        if self.min_score.is_some() || self.max_score.is_some() {
            let Some(score) = record.current_score().map(|s| s.value) else {
                return false;
            };
            if self.min_score.is_some_and(|min| score < min) || self.max_score.is_some_and(|max| score > max) {
                return false;
            }
        }
        if self.from.is_some() || self.to.is_some() {
            let Some(date) = record.report_date else {
                return false;
            };
            if self.from.is_some_and(|from| date < from) || self.to.is_some_and(|to| date > to) {
                return false;
            }
        }
        if let Some(text) = &self.text {
            let needle = text.to_lowercase();
            if !contains_folded(&record.description, &needle) && !contains_folded(&record.impact, &needle) {
                return false;
            }
        }
        true
    }
}

/// Builds a filter from textual `key=value` pairs as used in query strings.
///
/// Keys: `weakness`, `product` (`/`-separated prefix), `vendor`, `status`
/// (comma-separated, repeatable), `min_score`, `max_score`, `from`, `to`,
/// `q` or `text`, `page`, `page_size`. Empty values count as absent.
pub fn parse_filter_params<K: AsRef<str>, V: AsRef<str>>(
    pairs: impl IntoIterator<Item = (K, V)>,
) -> Result<QueryFilter, String> {
    fn parsed<T>(key: &str, value: &str, parse: impl FnOnce(&str) -> Option<T>) -> Result<T, String> {
        parse(value).ok_or_else(|| format!("{key}: cannot parse {value:?}"))
    }
    fn set_once<T>(slot: &mut Option<T>, key: &str, value: T) -> Result<(), String> {
        if slot.replace(value).is_some() {
            return Err(format!("{key} given more than once"));
        }
        Ok(())
    }

    let mut f = QueryFilter::default();
    let (mut page, mut page_size) = (None, None);
    for (key, value) in pairs {
        let (key, value) = (key.as_ref(), value.as_ref().trim());
        if value.is_empty() {
            continue;
        }
        match key {
            "weakness" => set_once(&mut f.weakness, key, parsed(key, value, |v| v.parse().ok())?)?,
            "product" => {
                let prefix = parse_product_prefix(value).map_err(|e| format!("product: {e}"))?;
                set_once(&mut f.product, key, prefix)?
            }
            "vendor" => set_once(&mut f.vendor, key, value.to_string())?,
            "status" => {
                let set = f.status.get_or_insert_with(BTreeSet::new);
                for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    set.insert(parsed(key, part, LifecycleStatus::parse)?);
                }
            }
            "min_score" => set_once(&mut f.min_score, key, parsed(key, value, score_text)?)?,
            "max_score" => set_once(&mut f.max_score, key, parsed(key, value, score_text)?)?,
            "from" => set_once(&mut f.from, key, parsed(key, value, |v| v.parse().ok())?)?,
            "to" => set_once(&mut f.to, key, parsed(key, value, |v| v.parse().ok())?)?,
            "q" | "text" => set_once(&mut f.text, "text", value.to_string())?,
            "page" => set_once(&mut page, key, parsed(key, value, |v| v.parse::<u32>().ok())?)?,
            "page_size" => set_once(&mut page_size, key, parsed(key, value, |v| v.parse::<u32>().ok())?)?,
            other => return Err(format!("unknown filter parameter {other:?}")),
        }
    }
    f.page = page.unwrap_or(1);
    f.page_size = page_size.unwrap_or(DEFAULT_PAGE_SIZE);
    f.check()?;
    Ok(f)
}

fn score_text(text: &str) -> Option<ScoreValue> {
    ScoreValue::from_f64(text.parse().ok()?).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Page {
    pub items: Vec<VulnerabilityRecord>,
    pub total: usize,
    pub page: u32,
    pub page_size: u32,
}

/// Runs `filter` using the weakness and status indexes to narrow candidates.
/// The caller has already checked the filter.
pub(crate) fn run_query(state: &RegistryState, filter: &QueryFilter) -> Page {
    let mut candidates: Option<BTreeSet<AiCveId>> = None;
    let mut narrow = |ids: BTreeSet<AiCveId>| {
        candidates = Some(match candidates.take() {
            Some(existing) => existing.intersection(&ids).copied().collect(),
            None => ids,
        });
    };
    if let Some(w) = filter.weakness {
        narrow(state.ids_with_weakness(w).cloned().unwrap_or_default());
    }
    if let Some(statuses) = &filter.status {
        let ids = statuses
            .iter()
            .filter_map(|s| state.ids_with_status(*s))
            .flatten()
            .copied()
            .collect();
        narrow(ids);
    }

    let hits: Vec<&VulnerabilityRecord> = state
        .ordered_ids()
        .filter(|id| candidates.as_ref().is_none_or(|c| c.contains(id)))
        .filter_map(|id| state.get(id))
        .filter(|record| filter.matches(record))
        .collect();
    let start = (filter.page as usize - 1).saturating_mul(filter.page_size as usize);
    Page {
        total: hits.len(),
        items: hits
            .into_iter()
            .skip(start)
            .take(filter.page_size as usize)
            .cloned()
            .collect(),
        page: filter.page,
        page_size: filter.page_size,
    }
}
