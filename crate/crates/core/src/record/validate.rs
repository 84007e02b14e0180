use chrono::NaiveDate;

use crate::aibom::check_aibom_into;
use crate::catalog::Catalog;
use crate::validation::{ValidationProfile, ValidationReport};

use super::VulnerabilityRecord;

/// One Minimum Element, the record field that carries it, and the first
/// profile at which it must be populated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimumElement {
    pub number: u8,
    pub name: &'static str,
    pub path: &'static str,
    pub required_from: ValidationProfile,
}

const fn me(number: u8, name: &'static str, path: &'static str, required_from: ValidationProfile) -> MinimumElement {
    MinimumElement {
        number,
        name,
        path,
        required_from,
    }
}

pub const MINIMUM_ELEMENTS: [MinimumElement; 15] = {
    use ValidationProfile::*;
    [
        me(1, "AI-CVE ID", "id", Disclosure),
        me(2, "AI Model Details", "ai_system", Submission),
        me(3, "Weakness Type", "weaknesses", Triage),
        me(4, "Root Cause", "root_causes", Triage),
        me(5, "Impact", "impact", Triage),
        me(6, "Severity Scores", "severity", Disclosure),
        me(7, "Affected Software & Products", "affected_products", Triage),
        me(8, "Exploitability", "exploitability", Triage),
        me(9, "Description", "description", Submission),
        me(10, "Mitigation", "mitigations", Disclosure),
        me(11, "References", "references", Disclosure),
        me(12, "Report Date", "report_date", Submission),
        me(13, "Reported By", "reported_by", Submission),
        me(14, "Vendor", "vendors", Triage),
        me(15, "Status", "status", Disclosure),
    ]
};

fn blank(text: &str) -> bool {
    text.trim().is_empty()
}

fn any_text(items: &[String]) -> bool {
    items.iter().any(|s| !blank(s))
}

/// Paths under `me` that are unpopulated. An empty result means populated.
fn missing_parts(record: &VulnerabilityRecord, element: &MinimumElement) -> Vec<String> {
    let whole = |missing: bool| if missing { vec![element.path.to_string()] } else { Vec::new() };
    match element.number {
        1 => whole(record.id.is_none()),
        2 => {
            let mut parts = Vec::new();
            if blank(&record.ai_system.name) {
                parts.push("ai_system.name".to_string());
            }
            if blank(&record.ai_system.model_type) {
                parts.push("ai_system.type".to_string());
            }
            parts
        }
        3 => whole(record.weaknesses.is_empty()),
        4 => whole(!any_text(&record.root_causes)),
        5 => whole(blank(&record.impact)),
        6 => whole(record.severity.current().is_none()),
        7 => whole(record.affected_products.is_empty()),
        8 => whole(record.exploitability.is_none()),
        9 => whole(blank(&record.description)),
        10 => whole(record.mitigations.is_empty()),
        11 => whole(!record.references.iter().any(|r| !blank(&r.title))),
        12 => whole(record.report_date.is_none()),
        13 => whole(blank(&record.reported_by)),
        14 => whole(!any_text(&record.vendors)),
        15 => whole(record.status.is_none()),
        _ => unreachable!("fifteen elements"),
    }
}

/// Checks `record` against the rules of `profile`.
///
/// Reference integrity, mitigation shape and the report date are checked at
/// every profile; element presence follows [`MINIMUM_ELEMENTS`].
pub fn validate_record(
    record: &VulnerabilityRecord,
    profile: ValidationProfile,
    catalog: &Catalog,
    today: NaiveDate,
) -> ValidationReport {
    let mut report = ValidationReport::new(Some(profile));

    for element in MINIMUM_ELEMENTS.iter().filter(|e| e.required_from <= profile) {
        for path in missing_parts(record, element) {
            report.error(
                "MISSING_FIELD",
                path,
                format!("ME {} ({}) is required at {profile:?}", element.number, element.name),
            );
        }
    }

    for (i, weakness) in record.weaknesses.iter().enumerate() {
        if !catalog.contains_weakness(*weakness) {
            report.error(
                "DANGLING_WEAKNESS_REF",
                format!("weaknesses[{i}]"),
                format!("{weakness} is not in the catalog"),
            );
        }
    }

    for (i, mitigation) in record.mitigations.iter().enumerate() {
        if let Some(id) = mitigation.catalog_ref {
            if !catalog.contains_mitigation(id) {
                report.error(
                    "DANGLING_MITIGATION_REF",
                    format!("mitigations[{i}].catalog_ref"),
                    format!("{id} is not in the catalog"),
                );
            }
        }
        if mitigation.none_known {
            if record.mitigations.len() > 1 {
                report.error(
                    "NONE_KNOWN_NOT_ALONE",
                    format!("mitigations[{i}]"),
                    "a none-known marker cannot sit beside other mitigations",
                );
            }
        } else if mitigation.catalog_ref.is_none() && blank(&mitigation.narrative) {
            report.error(
                "EMPTY_MITIGATION",
                format!("mitigations[{i}]"),
                "a mitigation needs a catalog reference or a narrative",
            );
        }
    }

    if let Some(date) = record.report_date {
        if date > today {
            report.error(
                "FUTURE_REPORT_DATE",
                "report_date",
                format!("{date} is after {today}"),
            );
        }
    }

    if profile == ValidationProfile::Disclosure {
        if let Some(profile) = &record.exploitability {
            if !any_text(&profile.required_actions) {
                report.error(
                    "MISSING_REQUIRED_ACTIONS",
                    "exploitability.required_actions",
                    "disclosed records list the steps an attacker must take",
                );
            }
        }
        if let Some(doc) = &record.ai_system.aibom {
            check_aibom_into(doc, "ai_system.aibom.", &mut report);
        }
    }

    report
}
