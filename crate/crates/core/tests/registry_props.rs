use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};
use std::thread;

use aivd_core::ids::AiCveId;
use aivd_core::record::{LifecycleStatus, VulnerabilityRecord};
use aivd_core::registry::{
    replay, Clock, CnaRegistration, EventKind, ManualClock, QueryFilter, Registry, RegistryEvent, YearRange,
};
use aivd_core::seed;
use aivd_core::severity::Trigger;
use aivd_core::testing;
use chrono::{Duration, TimeZone, Utc};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map};

const CNAS: [&str; 3] = ["alpha", "beta", "gamma"];

fn clock() -> Arc<ManualClock> {
    Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap()))
}

fn register_all(reg: &mut Registry) {
    for cna in CNAS {
        reg.register_cna(CnaRegistration {
            cna_id: cna.to_string(),
            name: cna.to_uppercase(),
            allowed_year_range: YearRange { from: 2020, to: 2030 },
        })
        .unwrap();
    }
}

fn in_memory() -> (Registry, Arc<ManualClock>) {
    let clock = clock();
    let mut reg = Registry::in_memory(seed::seed_catalog(), clock.clone());
    register_all(&mut reg);
    (reg, clock)
}

/// Applies one random operation. Errors are expected and leave state untouched.
fn random_step(reg: &mut Registry, clock: &ManualClock, rng: &mut ChaCha8Rng, submitted: &mut Vec<(String, AiCveId)>) {
    clock.advance(Duration::seconds(rng.gen_range(0..5000)));
    let before_state = reg.state().clone();
    let before_events = reg.events().len();
    let ids: Vec<AiCveId> = reg.state().records().filter_map(|r| r.id).collect();
    let target = ids.choose(rng).copied();
    let result = match (rng.gen_range(0..10), target) {
        (0..=3, _) | (_, None) => {
            let cna = *CNAS.choose(rng).unwrap();
            let mut draft = testing::draft(rng, reg.catalog());
            if rng.gen_bool(0.1) {
                draft.reported_by.clear();
            }
            reg.submit(draft, cna).map(|r| submitted.push((cna.to_string(), r.id.unwrap())))
        }
        (4..=6, Some(id)) => {
            let to = *LifecycleStatus::ALL.choose(rng).unwrap();
            reg.transition_status(id, to, "triager", "").map(drop)
        }
        (7, Some(id)) => {
            let vector = testing::vector(rng);
            let trigger = *[Trigger::ModelUpdate, Trigger::DataDrift, Trigger::Scheduled].choose(rng).unwrap();
            reg.rescore(id, &vector, trigger, "scanner", "").map(drop)
        }
        (_, Some(id)) => {
            let mut fields = Map::new();
            match rng.gen_range(0..4) {
                0 => fields.insert("description".into(), json!(testing::nonblank_text(rng))),
                1 => fields.insert("x_triage_note".into(), json!(testing::text(rng))),
                2 => fields.insert("status".into(), json!("Resolved")),
                _ => fields.insert("description".into(), json!(null)),
            };
            reg.update_fields(id, fields, "editor").map(drop)
        }
    };
    if result.is_err() {
        assert_eq!(reg.state(), &before_state);
        assert_eq!(reg.events().len(), before_events);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn replaying_the_log_rebuilds_the_state(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut reg, clock) = in_memory();
        let mut submitted = Vec::new();
        for _ in 0..rng.gen_range(1..60) {
            random_step(&mut reg, &clock, &mut rng, &mut submitted);
        }
        let rebuilt = replay(reg.events()).unwrap();
        prop_assert_eq!(&rebuilt, reg.state());
        let sequences: Vec<u64> = reg.events().iter().map(|e| e.sequence).collect();
        prop_assert_eq!(sequences, (1..=reg.events().len() as u64).collect::<Vec<_>>());
        let reparsed: Vec<RegistryEvent> = reg.events().iter().map(|e| serde_json::from_str(&e.to_line()).unwrap()).collect();
        prop_assert_eq!(&reparsed, reg.events());
    }

    #[test]
    fn ids_are_unique_and_rise_per_cna_and_year(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut reg, clock) = in_memory();
        let mut submitted = Vec::new();
        for _ in 0..80 {
            random_step(&mut reg, &clock, &mut rng, &mut submitted);
        }
        let distinct: BTreeSet<AiCveId> = submitted.iter().map(|(_, id)| *id).collect();
        prop_assert_eq!(distinct.len(), submitted.len());
        let mut last: BTreeMap<(String, u16), u32> = BTreeMap::new();
        for (cna, id) in &submitted {
            let prev = last.insert((cna.clone(), id.year()), id.serial());
            prop_assert!(prev.is_none_or(|p| p < id.serial()), "{cna} {id}");
        }
    }

    #[test]
    fn query_agrees_with_a_linear_scan(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut reg, clock) = in_memory();
        let mut submitted = Vec::new();
        for _ in 0..50 {
            random_step(&mut reg, &clock, &mut rng, &mut submitted);
        }
        for _ in 0..20 {
            let filter = testing::filter(&mut rng, reg.catalog());
            let page = reg.query(&filter).unwrap();
            let all = linear_query(reg.state().records(), &filter);
            prop_assert_eq!(page.total, all.len());
            let start = (filter.page as usize - 1) * filter.page_size as usize;
            let want: Vec<Option<AiCveId>> = all.iter().skip(start).take(filter.page_size as usize).map(|r| r.id).collect();
            let got: Vec<Option<AiCveId>> = page.items.iter().map(|r| r.id).collect();
            prop_assert_eq!(got, want, "{:?}", filter);
        }
    }
}

/// Reference predicate written out field by field, newest report first.
fn linear_query<'a>(records: impl Iterator<Item = &'a VulnerabilityRecord>, f: &QueryFilter) -> Vec<&'a VulnerabilityRecord> {
    let lower = |s: &str| s.to_lowercase();
    let mut hits: Vec<&VulnerabilityRecord> = records
        .filter(|r| f.weakness.is_none_or(|w| r.weaknesses.contains(&w)))
        .filter(|r| {
            f.product.as_ref().is_none_or(|prefix| {
                r.affected_products.iter().any(|p| {
                    let segs = p.identifier.segments();
                    segs.len() >= prefix.len() && prefix.iter().zip(segs).all(|(a, b)| lower(a) == lower(b))
                })
            })
        })
        .filter(|r| f.vendor.as_ref().is_none_or(|v| r.vendors.iter().any(|x| lower(x).contains(&lower(v)))))
        .filter(|r| f.status.as_ref().is_none_or(|set| r.status.is_some_and(|s| set.contains(&s))))
        .filter(|r| {
            let score = r.severity.history.current().map(|s| s.value.tenths());
            f.min_score.is_none_or(|m| score.is_some_and(|s| s >= m.tenths()))
                && f.max_score.is_none_or(|m| score.is_some_and(|s| s <= m.tenths()))
        })
        .filter(|r| {
            f.from.is_none_or(|d| r.report_date.is_some_and(|x| x >= d))
                && f.to.is_none_or(|d| r.report_date.is_some_and(|x| x <= d))
        })
        .filter(|r| {
            f.text.as_ref().is_none_or(|t| {
                lower(&r.description).contains(&lower(t)) || lower(&r.impact).contains(&lower(t))
            })
        })
        .collect();
    hits.sort_by_key(|r| (Reverse(r.report_date), r.id));
    hits
}

#[test]
fn parallel_submissions_get_distinct_ids_and_contiguous_events() {
    const THREADS: usize = 8;
    const EACH: usize = 25;
    let (reg, _clock) = in_memory();
    let reg = Arc::new(Mutex::new(reg));
    let handles: Vec<_> = (0..THREADS)
        .map(|t| {
            let reg = Arc::clone(&reg);
            thread::spawn(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(t as u64);
                let catalog = seed::seed_catalog();
                (0..EACH)
                    .map(|_| {
                        let draft = testing::draft(&mut rng, &catalog);
                        reg.lock().unwrap().submit(draft, CNAS[t % CNAS.len()]).unwrap().id.unwrap()
                    })
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let ids: Vec<AiCveId> = handles.into_iter().flat_map(|h| h.join().unwrap()).collect();
    let reg = reg.lock().unwrap();
    assert_eq!(ids.iter().collect::<BTreeSet<_>>().len(), THREADS * EACH);
    let events = reg.events();
    assert_eq!(events.len(), THREADS * EACH);
    assert!(events.iter().all(|e| e.kind() == EventKind::Submitted));
    assert!(events.iter().enumerate().all(|(i, e)| e.sequence == i as u64 + 1));
}

#[test]
fn reopening_a_store_restores_state_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let clock = clock();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (state, events) = {
        let mut reg = Registry::open(dir.path(), clock.clone()).unwrap();
        register_all(&mut reg);
        let mut submitted = Vec::new();
        for _ in 0..60 {
            random_step(&mut reg, &clock, &mut rng, &mut submitted);
        }
        reg.sync().unwrap();
        (reg.state().clone(), reg.events().to_vec())
    };
    let reopened = Registry::open(dir.path(), clock.clone()).unwrap();
    assert_eq!(reopened.state(), &state);
    assert_eq!(reopened.events(), events.as_slice());
    assert_eq!(reopened.cnas().count(), CNAS.len());
}

#[test]
fn corrupt_logs_refuse_to_open() {
    let dir = tempfile::tempdir().unwrap();
    let clock = clock();
    {
        let mut reg = Registry::open(dir.path(), clock.clone()).unwrap();
        register_all(&mut reg);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..3 {
            reg.submit(testing::draft(&mut rng, &seed::seed_catalog()), "alpha").unwrap();
        }
    }
    let log = dir.path().join("events.ndjson");
    let text = std::fs::read_to_string(&log).unwrap();
    let without_second: Vec<&str> = text.lines().enumerate().filter(|(i, _)| *i != 1).map(|(_, l)| l).collect();
    std::fs::write(&log, without_second.join("\n") + "\n").unwrap();
    assert_eq!(Registry::open(dir.path(), clock.clone()).unwrap_err().code(), "CORRUPT_STORE");
    std::fs::write(&log, "{not json\n").unwrap();
    assert_eq!(Registry::open(dir.path(), clock).unwrap_err().code(), "CORRUPT_STORE");
}

#[test]
fn export_then_import_reproduces_every_record() {
    let (mut reg, clock) = in_memory();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut submitted = Vec::new();
    for _ in 0..120 {
        random_step(&mut reg, &clock, &mut rng, &mut submitted);
    }
    let mut seed_record = seed::seed_record();
    seed_record.id = None;
    seed_record.status = None;
    let seeded = reg.submit(seed_record, "alpha").unwrap();
    assert!(seeded.ai_system.aibom.is_some());

    let out = tempfile::tempdir().unwrap();
    let summary = reg.export(out.path()).unwrap();
    assert_eq!(summary.records, reg.state().len());
    assert!(summary.aiboms >= 1);

    let target = tempfile::tempdir().unwrap();
    let mut copy = Registry::open(target.path(), clock.clone() as Arc<dyn Clock>).unwrap();
    let imported = copy.import(out.path(), "importer").unwrap();
    assert_eq!(imported.len(), reg.state().len());
    let original: Vec<&VulnerabilityRecord> = reg.state().records().collect();
    let restored: Vec<&VulnerabilityRecord> = copy.state().records().collect();
    assert_eq!(restored, original);
    assert_eq!(replay(copy.events()).unwrap(), *copy.state());

    let reopened = Registry::open(target.path(), clock).unwrap();
    assert_eq!(reopened.state(), copy.state());
    assert_eq!(reopened.cnas().count(), CNAS.len());
}

#[test]
fn importing_twice_is_a_duplicate() {
    let (mut reg, clock) = in_memory();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    reg.submit(testing::draft(&mut rng, &seed::seed_catalog()), "beta").unwrap();
    let out = tempfile::tempdir().unwrap();
    reg.export(out.path()).unwrap();
    let mut copy = Registry::in_memory(seed::seed_catalog(), clock);
    copy.import(out.path(), "importer").unwrap();
    let before = copy.state().clone();
    assert_eq!(copy.import(out.path(), "importer").unwrap_err().code(), "DUPLICATE_RECORD");
    assert_eq!(copy.state(), &before);
}

#[test]
fn privacy_weakness_query_finds_the_seed_record() {
    let (mut reg, _clock) = in_memory();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let mut draft = testing::draft(&mut rng, reg.catalog());
        draft.weaknesses.retain(|w| w.number() != 103);
        if draft.weaknesses.is_empty() {
            continue;
        }
        reg.submit(draft, "gamma").unwrap();
    }
    let mut record = seed::seed_record();
    record.id = None;
    record.status = None;
    let stored = reg.submit(record, "alpha").unwrap();
    let filter = QueryFilter {
        weakness: Some("AI-CWE-103".parse().unwrap()),
        ..QueryFilter::default()
    };
    let page = reg.query(&filter).unwrap();
    assert_eq!(page.total, 1);
    assert_eq!(page.items[0].id, stored.id);
    assert_eq!(stored.id.unwrap().year(), 2024);
}
