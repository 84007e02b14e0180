use std::collections::BTreeSet;

use aivd_core::ids::AiCveId;
use aivd_core::record::{
    parse_record, record_from_value, serialize_record, validate_record, LifecycleStatus, VulnerabilityRecord,
    MINIMUM_ELEMENTS, RECORD_KEYS,
};
use aivd_core::seed;
use aivd_core::testing;
use aivd_core::validation::{Level, ValidationProfile};
use chrono::NaiveDate;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn today() -> NaiveDate {
    NaiveDate::from_ymd_opt(2031, 1, 1).unwrap()
}

fn seed_day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 3, 25).unwrap()
}

fn error_set(record: &VulnerabilityRecord, profile: ValidationProfile) -> BTreeSet<(String, String)> {
    validate_record(record, profile, &seed::seed_catalog(), today())
        .findings
        .into_iter()
        .filter(|f| f.level == Level::Error)
        .map(|f| (f.code, f.path))
        .collect()
}

/// A draft with a random subset of elements blanked and a lifecycle tail filled in.
fn partial_record(rng: &mut ChaCha8Rng) -> VulnerabilityRecord {
    let mut r = testing::draft(rng, &seed::seed_catalog());
    if rng.gen_bool(0.7) {
        r.id = Some(AiCveId::new(2024, rng.gen_range(1..5000)).unwrap());
        r.status = Some(LifecycleStatus::Reported);
    }
    let mut doc = serde_json::to_value(&r).unwrap();
    let map = doc.as_object_mut().unwrap();
    for key in RECORD_KEYS {
        if rng.gen_bool(0.08) {
            map.remove(key);
        }
    }
    record_from_value(doc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_inverts_serialize(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = testing::record(&mut rng);
        let text = serialize_record(&r);
        let back = parse_record(&text).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(serialize_record(&back), text);
    }

    #[test]
    fn top_level_keys_follow_canonical_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = testing::record(&mut rng);
        let doc: Value = serde_json::from_str(&serialize_record(&r)).unwrap();
        let keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| RECORD_KEYS.iter().position(|c| c == k).expect("known key"))
            .collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]), "{keys:?}");
    }

    #[test]
    fn profile_errors_are_nested(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = if rng.gen_bool(0.5) { partial_record(&mut rng) } else { testing::record(&mut rng) };
        let sub = error_set(&r, ValidationProfile::Submission);
        let tri = error_set(&r, ValidationProfile::Triage);
        let dis = error_set(&r, ValidationProfile::Disclosure);
        prop_assert!(sub.is_subset(&tri), "{sub:?} vs {tri:?}");
        prop_assert!(tri.is_subset(&dis), "{tri:?} vs {dis:?}");
    }

    #[test]
    fn validation_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = partial_record(&mut rng);
        let catalog = seed::seed_catalog();
        for profile in ValidationProfile::ALL {
            prop_assert_eq!(
                validate_record(&r, profile, &catalog, today()),
                validate_record(&r, profile, &catalog, today())
            );
        }
    }
}

#[test]
fn profile_validity_is_monotone_over_many_partial_records() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let catalog = seed::seed_catalog();
    let mut disclosure_valid = 0;
    for _ in 0..3000 {
        let r = partial_record(&mut rng);
        let valid = |p| validate_record(&r, p, &catalog, today()).is_valid();
        if valid(ValidationProfile::Disclosure) {
            disclosure_valid += 1;
            assert!(valid(ValidationProfile::Triage));
        }
        if valid(ValidationProfile::Triage) {
            assert!(valid(ValidationProfile::Submission));
        }
    }
    assert!(disclosure_valid > 100, "generator rarely reaches Disclosure: {disclosure_valid}");
}

#[test]
fn each_minimum_element_is_enforced_from_its_profile() {
    let catalog = seed::seed_catalog();
    let full = serde_json::to_value(seed::seed_record()).unwrap();
    for element in MINIMUM_ELEMENTS {
        let mut doc = full.clone();
        doc.as_object_mut().unwrap().remove(element.path);
        let record = record_from_value(doc).unwrap();
        let path = if element.number == 2 { "ai_system.name" } else { element.path };
        for profile in ValidationProfile::ALL {
            let report = validate_record(&record, profile, &catalog, seed_day());
            assert_eq!(
                report.has_error("MISSING_FIELD", path),
                profile >= element.required_from,
                "ME {} at {profile:?}: {:?}",
                element.number,
                report.findings
            );
        }
    }
}

#[test]
fn element_table_in_docs_matches_the_code() {
    let docs = include_str!("../../../docs/minimum-elements.md");
    let rows: Vec<Vec<String>> = docs
        .lines()
        .filter(|l| l.starts_with("| ") && l.chars().nth(2).is_some_and(|c| c.is_ascii_digit()))
        .map(|l| l.trim_matches('|').split('|').map(|c| c.trim().trim_matches('`').to_string()).collect())
        .collect();
    assert_eq!(rows.len(), MINIMUM_ELEMENTS.len());
    for (row, element) in rows.iter().zip(MINIMUM_ELEMENTS) {
        assert_eq!(row[0], element.number.to_string());
        assert_eq!(row[1], element.name);
        assert_eq!(row[2], element.path);
        assert_eq!(row[3], format!("{:?}", element.required_from));
    }
}

#[test]
fn seed_record_resolves_its_weakness_text() {
    let record = seed::seed_record();
    assert_eq!(record.id.unwrap().to_string(), "AI-CVE-2024-1234");
    let text = record.extensions["weakness_text"].as_str().unwrap();
    let entry = seed::seed_catalog().find_weakness_by_name(text).cloned().unwrap();
    assert_eq!(record.weaknesses, vec![entry.id]);
}

#[test]
fn seed_round_trips_byte_for_byte() {
    let record = parse_record(seed::SEED_RECORD).unwrap();
    assert_eq!(serialize_record(&record), seed::SEED_RECORD);
}

#[test]
fn minimal_document_leaves_everything_else_empty() {
    let doc = json!({
        "description": "Queries reveal training membership",
        "report_date": "2024-03-25",
        "reported_by": "Analyst",
        "ai_system": {"name": "Classifier", "type": "CNN"}
    });
    let r = record_from_value(doc).unwrap();
    assert!(r.id.is_none() && r.weaknesses.is_empty() && r.severity.is_empty());
    assert!(r.exploitability.is_none() && r.status.is_none() && r.extensions.is_empty());
    assert!(validate_record(&r, ValidationProfile::Submission, &seed::seed_catalog(), seed_day()).is_valid());
    let text = serialize_record(&r);
    let keys: Vec<String> = serde_json::from_str::<serde_json::Map<String, Value>>(&text)
        .unwrap()
        .keys()
        .cloned()
        .collect();
    assert_eq!(keys, ["ai_system", "description", "report_date", "reported_by"]);
}

#[test]
fn malformed_inputs_map_to_their_codes() {
    assert_eq!(parse_record("{").unwrap_err().code(), "MALFORMED_DOCUMENT");
    assert_eq!(parse_record(r#"{"id":"CVE-2024-1234"}"#).unwrap_err().code(), "BAD_ID");
    assert_eq!(parse_record(r#"{"vendors":"Acme"}"#).unwrap_err().code(), "BAD_FIELD_TYPE");
    assert_eq!(parse_record(r#"{"report_date":"2024-13-01"}"#).unwrap_err().code(), "BAD_FIELD_TYPE");
}

#[test]
fn unknown_top_level_keys_survive_in_extensions() {
    let r = parse_record(r#"{"description":"d","x_vendor_note":{"a":[1,2]}}"#).unwrap();
    assert_eq!(r.extensions["x_vendor_note"], json!({"a": [1, 2]}));
    let again = parse_record(&serialize_record(&r)).unwrap();
    assert_eq!(again, r);
}

#[test]
fn future_report_date_is_rejected() {
    let mut r = seed::seed_record();
    r.report_date = NaiveDate::from_ymd_opt(2024, 3, 26);
    let report = validate_record(&r, ValidationProfile::Submission, &seed::seed_catalog(), seed_day());
    assert!(report.has_error("FUTURE_REPORT_DATE", "report_date"));
}
