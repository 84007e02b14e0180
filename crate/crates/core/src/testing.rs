//! Random value generators for property tests and the acceptance suite.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{Map, Value};

use crate::aibom::{AibomDocument, DataAvailability, Dependency, Measure, ModelAvailability};
use crate::catalog::Catalog;
use crate::ids::{AiCveId, AiCweId, MitigationId};
use crate::record::{
    parse_product_id, AffectedProduct, AiSystem, ExploitabilityProfile, LifecycleStatus, MitigationRef,
    PrivilegeLevel, StatusChange, TechnicalComplexity, VulnerabilityRecord,
};
use crate::reference::Reference;
use crate::registry::QueryFilter;
use crate::severity::{
    compute_score, AttackComplexity, AttackVector, Automatable, HistoryEntry, Impact, PrivilegesRequired, Recovery,
    Safety, ScoreHistory, ScoreValue, Scope, SeverityAssessment, SeverityVector, Supplemental, Trigger,
    UserInteraction, ValueDensity,
};

const WORDS: &[&str] = &[
    "model", "data", "Gradient", "shadow", "inference", "poison", "label", "API", "drift", "token", "Ünïcode",
    "quote\"d", "back\\slash", "tab\there", "line\nbreak", "emoji 🚀", "", "  ", "a/b", "x.y",
];

pub fn pick<'a, T, R: Rng + ?Sized>(rng: &mut R, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty choice")
}

pub fn text<R: Rng + ?Sized>(rng: &mut R) -> String {
    let n = rng.gen_range(0..5);
    (0..n).map(|_| *pick(rng, WORDS)).collect::<Vec<_>>().join(" ")
}

pub fn nonblank_text<R: Rng + ?Sized>(rng: &mut R) -> String {
    format!("{} {}", pick(rng, &["alpha", "beta", "gamma", "delta"]), text(rng))
}

fn texts<R: Rng + ?Sized>(rng: &mut R, max: usize) -> Vec<String> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| text(rng)).collect()
}

fn maybe<R: Rng + ?Sized, T>(rng: &mut R, f: impl FnOnce(&mut R) -> T) -> Option<T> {
    rng.gen_bool(0.5).then(|| f(rng))
}

fn finite<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(-1e6..1e6),
        1 => f64::from(rng.gen_range(-1000i32..1000)),
        2 => rng.gen::<f64>(),
        _ => rng.gen_range(-1e300..1e300),
    }
}

pub fn date<R: Rng + ?Sized>(rng: &mut R, years: std::ops::RangeInclusive<i32>) -> NaiveDate {
    let year = rng.gen_range(years);
    NaiveDate::from_ymd_opt(year, 1, 1).unwrap() + Duration::days(rng.gen_range(0..365))
}

pub fn timestamp<R: Rng + ?Sized>(rng: &mut R) -> DateTime<Utc> {
    let base = Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap();
    base + Duration::seconds(rng.gen_range(0..200_000_000)) + Duration::nanoseconds(rng.gen_range(0..3) * 1_000_000)
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R) -> SeverityVector {
    let impact = |rng: &mut R| *pick(rng, Impact::ALL);
    SeverityVector {
        av: *pick(rng, AttackVector::ALL),
        ac: *pick(rng, AttackComplexity::ALL),
        pr: *pick(rng, PrivilegesRequired::ALL),
        ui: *pick(rng, UserInteraction::ALL),
        scope: *pick(rng, Scope::ALL),
        c: impact(rng),
        i: impact(rng),
        a: impact(rng),
        dp: impact(rng),
        mi: impact(rng),
        ae: impact(rng),
        ds: impact(rng),
        supplemental: supplemental(rng),
    }
}

pub fn supplemental<R: Rng + ?Sized>(rng: &mut R) -> Supplemental {
    Supplemental {
        safety: maybe(rng, |r| *pick(r, Safety::ALL)),
        automatable: maybe(rng, |r| *pick(r, Automatable::ALL)),
        recovery: maybe(rng, |r| *pick(r, Recovery::ALL)),
        value_density: maybe(rng, |r| *pick(r, ValueDensity::ALL)),
    }
}

fn map_of<R: Rng + ?Sized, V>(rng: &mut R, mut value: impl FnMut(&mut R) -> V) -> BTreeMap<String, V> {
    let n = rng.gen_range(0..4);
    (0..n).map(|_| (text(rng), value(rng))).collect()
}

fn measure<R: Rng + ?Sized>(rng: &mut R) -> Measure {
    Measure {
        text: text(rng),
        amount: maybe(rng, finite),
    }
}

pub fn aibom<R: Rng + ?Sized>(rng: &mut R) -> AibomDocument {
    let mut doc = AibomDocument::default();
    let m = &mut doc.meta;
    m.generation_tool = text(rng);
    m.creator = text(rng);
    m.certification = texts(rng, 2);
    m.release_date = maybe(rng, |r| date(r, 2000..=2030));
    m.license = text(rng);

    let md = &mut doc.model;
    md.source = text(rng);
    md.availability = maybe(rng, |r| *pick(r, &[ModelAvailability::Public, ModelAvailability::Restricted]));
    md.foundation_model = text(rng);
    md.additional_models = texts(rng, 2);
    md.weights_ref = text(rng);
    md.scripts = texts(rng, 2);
    md.hyperparameters = map_of(rng, text);
    md.configurations = map_of(rng, text);
    md.domain = text(rng);
    md.training_process = text(rng);
    md.software_requirements = texts(rng, 3);
    md.hardware_requirements = texts(rng, 2);
    md.evaluation_process = text(rng);
    let deps = rng.gen_range(0..4);
    md.dependencies = (0..deps)
        .map(|_| Dependency {
            name: text(rng),
            version: text(rng),
        })
        .collect();

    let d = &mut doc.data;
    d.source = text(rng);
    d.availability = maybe(rng, |r| *pick(r, &[DataAvailability::Public, DataAvailability::Private]));
    d.collection_method = text(rng);
    d.preprocessing = texts(rng, 3);
    d.input_output_format = text(rng);
    d.quantitative_measures = map_of(rng, finite);
    d.qualitative_measures = texts(rng, 2);
    d.governance = text(rng);
    d.annotation = text(rng);

    let c = &mut doc.consideration;
    c.ethical = text(rng);
    c.environmental = text(rng);
    c.energy_usage = maybe(rng, measure);
    c.carbon_footprint = maybe(rng, measure);
    c.risk = texts(rng, 2);
    c.mitigation = texts(rng, 2);
    c.recommendation = texts(rng, 2);

    doc.usage.intended = texts(rng, 2);
    doc.usage.out_of_scope = texts(rng, 2);
    doc.usage.malicious = texts(rng, 2);
    doc
}

/// A second document derived from `a` by a handful of random edits, or a
/// fresh one, so diffs range from tiny to total.
pub fn aibom_variant<R: Rng + ?Sized>(rng: &mut R, a: &AibomDocument) -> AibomDocument {
    if rng.gen_bool(0.25) {
        return aibom(rng);
    }
    let mut b = a.clone();
    let fresh = aibom(rng);
    for _ in 0..rng.gen_range(0..6) {
        match rng.gen_range(0..8) {
            0 => b.data.source = fresh.data.source.clone(),
            1 => b.model.dependencies = fresh.model.dependencies.clone(),
            2 => b.model.hyperparameters = fresh.model.hyperparameters.clone(),
            3 => b.meta = fresh.meta.clone(),
            4 => b.consideration.energy_usage = fresh.consideration.energy_usage.clone(),
            5 => b.usage = fresh.usage.clone(),
            6 => b.data.quantitative_measures = fresh.data.quantitative_measures.clone(),
            _ => b.model.dependencies.push(Dependency {
                name: nonblank_text(rng),
                version: String::new(),
            }),
        }
    }
    b
}

fn json_value<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Value {
    match rng.gen_range(0..if depth == 0 { 4 } else { 6 }) {
        0 => Value::Null,
        1 => Value::Bool(rng.gen()),
        2 => serde_json::Number::from_f64(finite(rng)).map_or(Value::Null, Value::Number),
        3 => Value::String(text(rng)),
        4 => Value::Array((0..rng.gen_range(0..3)).map(|_| json_value(rng, depth - 1)).collect()),
        _ => Value::Object(
            (0..rng.gen_range(0..3))
                .map(|_| (text(rng), json_value(rng, depth - 1)))
                .collect(),
        ),
    }
}

fn history<R: Rng + ?Sized>(rng: &mut R) -> ScoreHistory {
    let mut history = ScoreHistory::new();
    let mut at = timestamp(rng);
    for _ in 0..rng.gen_range(0..4) {
        at += Duration::seconds(rng.gen_range(0..100_000));
        history = history
            .appended(HistoryEntry {
                score: compute_score(&vector(rng), at),
                trigger: *pick(rng, &Trigger::ALL),
                note: text(rng),
            })
            .expect("timestamps increase");
    }
    history
}

fn status_trail<R: Rng + ?Sized>(rng: &mut R) -> (LifecycleStatus, Vec<StatusChange>) {
    let mut status = LifecycleStatus::Reported;
    let mut trail = Vec::new();
    let mut at = timestamp(rng);
    for _ in 0..rng.gen_range(0..5) {
        let Some(&to) = status.successors().choose(rng) else { break };
        at += Duration::seconds(rng.gen_range(0..100_000));
        trail.push(StatusChange {
            from: status,
            to,
            actor: nonblank_text(rng),
            note: text(rng),
            at,
        });
        status = to;
    }
    (status, trail)
}

pub const PRODUCT_POOL: &[&str] = &[
    "2024/google/cloud/ModelV01",
    "2024/AWS/ModelV01",
    "2023/example/vision/ResNet50",
    "2022/Acme/llm/chat/v2",
    "2024/acme/LLM/v3",
];

pub const VENDOR_POOL: &[&str] = &["Google Cloud (Alphabet)", "AWS (Amazon)", "Acme Labs", "Example Corp", "ÉTS"];

/// Any record the type invariants admit; not necessarily valid under a profile.
pub fn record<R: Rng + ?Sized>(rng: &mut R) -> VulnerabilityRecord {
    let (status, status_history) = status_trail(rng);
    let products = rng.gen_range(0..3);
    VulnerabilityRecord {
        id: maybe(rng, |r| AiCveId::new(r.gen_range(1999..=2100), r.gen_range(1..200_000)).unwrap()),
        ai_system: AiSystem {
            name: text(rng),
            model_type: text(rng),
            version: text(rng),
            aibom: maybe(rng, aibom),
            aibom_ref: text(rng),
            components: texts(rng, 2),
        },
        weaknesses: (0..rng.gen_range(0..3))
            .map(|_| AiCweId::new(rng.gen_range(1..2000)).unwrap())
            .collect(),
        root_causes: texts(rng, 3),
        impact: text(rng),
        severity: SeverityAssessment {
            history: history(rng),
            rationale: text(rng),
        },
        affected_products: (0..products)
            .map(|_| AffectedProduct {
                display_name: text(rng),
                identifier: parse_product_id(pick(rng, PRODUCT_POOL)).unwrap(),
            })
            .collect(),
        exploitability: maybe(rng, |r| ExploitabilityProfile {
            technical_complexity: *pick(
                r,
                &[TechnicalComplexity::Low, TechnicalComplexity::Medium, TechnicalComplexity::High],
            ),
            privilege_level: *pick(
                r,
                &[
                    PrivilegeLevel::None,
                    PrivilegeLevel::User,
                    PrivilegeLevel::ModelQueryAccess,
                    PrivilegeLevel::TrainingDataAccess,
                    PrivilegeLevel::Administrative,
                ],
            ),
            required_actions: texts(r, 3),
            access_requirements: text(r),
        }),
        description: text(rng),
        mitigations: (0..rng.gen_range(0..3))
            .map(|_| MitigationRef {
                catalog_ref: maybe(rng, |r| MitigationId::new(r.gen_range(1..50)).unwrap()),
                narrative: text(rng),
                none_known: rng.gen_bool(0.1),
            })
            .collect(),
        references: (0..rng.gen_range(0..3))
            .map(|_| Reference {
                title: text(rng),
                url: maybe(rng, |r| format!("https://example.org/{}", r.gen::<u16>())),
            })
            .collect(),
        report_date: maybe(rng, |r| date(r, 1999..=2030)),
        reported_by: text(rng),
        vendors: texts(rng, 2),
        status: rng.gen_bool(0.8).then_some(status),
        status_history: if rng.gen_bool(0.8) { status_history } else { Vec::new() },
        extensions: (0..rng.gen_range(0..3))
            .map(|_| (text(rng), json_value(rng, 2)))
            .collect::<Map<String, Value>>(),
    }
}

/// A draft that passes the Submission profile against `catalog`, with every
/// element populated so it can climb the whole lifecycle.
pub fn draft<R: Rng + ?Sized>(rng: &mut R, catalog: &Catalog) -> VulnerabilityRecord {
    let weakness_ids: Vec<AiCweId> = catalog.weaknesses().map(|w| w.id).collect();
    let mitigation_ids: Vec<MitigationId> = catalog.mitigations().map(|m| m.id).collect();
    let scored = rng.gen_bool(0.8);
    let at = Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap() + Duration::days(rng.gen_range(0..1000));
    VulnerabilityRecord {
        id: None,
        ai_system: AiSystem {
            name: nonblank_text(rng),
            model_type: pick(rng, &["CNN", "Transformer", "GBDT"]).to_string(),
            ..AiSystem::default()
        },
        weaknesses: {
            let n = rng.gen_range(1..=2.min(weakness_ids.len()));
            weakness_ids.choose_multiple(rng, n).copied().collect()
        },
        root_causes: vec![nonblank_text(rng)],
        impact: format!("{} {}", pick(rng, &["Leaks", "Corrupts", "Degrades"]), nonblank_text(rng)),
        severity: SeverityAssessment {
            history: if scored {
                ScoreHistory::new()
                    .appended(HistoryEntry {
                        score: compute_score(&vector(rng), at),
                        trigger: Trigger::Initial,
                        note: String::new(),
                    })
                    .unwrap()
            } else {
                ScoreHistory::new()
            },
            rationale: String::new(),
        },
        affected_products: {
            let n = rng.gen_range(1..=2);
            PRODUCT_POOL
                .choose_multiple(rng, n)
                .map(|p| AffectedProduct {
                    display_name: p.to_string(),
                    identifier: parse_product_id(p).unwrap(),
                })
                .collect()
        },
        exploitability: Some(ExploitabilityProfile {
            technical_complexity: TechnicalComplexity::Medium,
            privilege_level: PrivilegeLevel::ModelQueryAccess,
            required_actions: vec![nonblank_text(rng)],
            access_requirements: String::new(),
        }),
        description: format!("{} {}", pick(rng, &["Membership", "Poisoning", "Evasion"]), nonblank_text(rng)),
        mitigations: match mitigation_ids.choose(rng) {
            Some(id) if rng.gen_bool(0.5) => vec![MitigationRef::catalog(*id)],
            _ => vec![MitigationRef::narrative(nonblank_text(rng))],
        },
        references: vec![Reference::new(nonblank_text(rng), None)],
        report_date: Some(date(rng, 2022..=2024)),
        reported_by: nonblank_text(rng),
        vendors: {
            let n = rng.gen_range(1..=2);
            VENDOR_POOL.choose_multiple(rng, n).map(|v| v.to_string()).collect()
        },
        status: None,
        status_history: Vec::new(),
        extensions: Map::new(),
    }
}

/// A filter drawn so that most criteria are absent and present ones hit often.
pub fn filter<R: Rng + ?Sized>(rng: &mut R, catalog: &Catalog) -> QueryFilter {
    let weakness_ids: Vec<AiCweId> = catalog.weaknesses().map(|w| w.id).collect();
    let score = |rng: &mut R| ScoreValue::from_tenths(rng.gen_range(0..=100)).unwrap();
    let mut f = QueryFilter {
        weakness: rng.gen_bool(0.3).then(|| *pick(rng, &weakness_ids)),
        product: rng.gen_bool(0.3).then(|| {
            let p = parse_product_id(pick(rng, PRODUCT_POOL)).unwrap();
            let n = rng.gen_range(1..=p.segments().len());
            p.segments()[..n].iter().map(|s| s.to_ascii_uppercase()).collect()
        }),
        vendor: rng.gen_bool(0.3).then(|| {
            let v = pick(rng, VENDOR_POOL);
            let chars: Vec<char> = v.chars().collect();
            let start = rng.gen_range(0..chars.len());
            let end = rng.gen_range(start + 1..=chars.len());
            chars[start..end].iter().collect::<String>().to_lowercase()
        }),
        status: rng.gen_bool(0.3).then(|| {
            let n = rng.gen_range(1..=3);
            LifecycleStatus::ALL.choose_multiple(rng, n).copied().collect::<BTreeSet<_>>()
        }),
        min_score: rng.gen_bool(0.25).then(|| score(rng)),
        max_score: rng.gen_bool(0.25).then(|| score(rng)),
        from: rng.gen_bool(0.25).then(|| date(rng, 2022..=2024)),
        to: rng.gen_bool(0.25).then(|| date(rng, 2022..=2024)),
        text: rng.gen_bool(0.2).then(|| pick(rng, &["membership", "LEAKS", "alpha", "zzz"]).to_string()),
        page: rng.gen_range(1..=3),
        page_size: rng.gen_range(1..=60),
    };
    if let (Some(a), Some(b)) = (f.min_score, f.max_score) {
        if a > b {
            f.min_score = Some(b);
            f.max_score = Some(a);
        }
    }
    if let (Some(a), Some(b)) = (f.from, f.to) {
        if a > b {
            f.from = Some(b);
            f.to = Some(a);
        }
    }
    f
}
