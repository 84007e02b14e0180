use std::collections::BTreeSet;

use aivd_core::catalog::{
    load_catalog, IntroductionMode, MitigationType, Orientation, WeaknessClass,
};
use aivd_core::ids::{AiCweId, MitigationId};
use aivd_core::seed;
use aivd_core::severity::Band;
use proptest::prelude::*;
use serde_json::{json, Value};

fn cwe(n: u32) -> AiCweId {
    AiCweId::new(n).unwrap()
}

const CLASSES: [&str; 4] = ["ValidationMechanism", "DataHandling", "LearningAlgorithm", "PrivacySafeguard"];

fn weakness(n: u32, class: &str, relationships: Vec<Value>, mitigations: Vec<String>) -> Value {
    json!({
        "id": format!("AI-CWE-{n}"),
        "name": format!("Weakness {n}"),
        "weakness_class": class,
        "description": "d",
        "severity_band": {"low": "Low", "high": "High"},
        "relationships": relationships,
        "potential_mitigations": mitigations,
    })
}

fn mitigation(n: u32, targets: Vec<String>) -> Value {
    json!({
        "id": format!("MIT-{n:04}"),
        "name": format!("Technique {n}"),
        "description": "d",
        "type": "Reactive",
        "orientation": "Model",
        "target_weaknesses": targets,
    })
}

#[test]
fn seed_matches_the_published_entries() {
    let catalog = seed::seed_catalog();
    assert_eq!(catalog.weaknesses().count(), 4);
    assert_eq!(catalog.mitigations().count(), 1);

    let entry = catalog.get_weakness(cwe(100)).unwrap();
    assert_eq!(entry.name, "Inadequate Input Filtering");
    assert_eq!(entry.weakness_class, WeaknessClass::DataHandling);
    assert_eq!(entry.modes_of_introduction, BTreeSet::from([IntroductionMode::Inference]));
    assert_eq!((entry.severity_band.low(), entry.severity_band.high()), (Band::High, Band::Critical));
    assert!(entry.relationships.is_empty());
    assert!(!entry.seed);
    assert_eq!(catalog.resolve_relationships(cwe(100)).unwrap(), Vec::<AiCweId>::new());

    let mitigations = catalog.get_mitigations_for(cwe(100)).unwrap();
    assert_eq!(mitigations.len(), 1);
    let m = mitigations[0];
    assert_eq!(m.name, "Adversarial Example Detection");
    assert_eq!(m.kind, MitigationType::Proactive);
    assert_eq!(m.orientation, Orientation::Data);
    assert_eq!(m.cons, ["Not effective against label flipping poisoning attacks"]);

    assert_eq!(
        catalog.list_by_class(WeaknessClass::DataHandling).iter().map(|e| e.id).collect::<Vec<_>>(),
        [cwe(100)]
    );
    let privacy = catalog.list_by_class(WeaknessClass::PrivacySafeguard);
    assert_eq!(privacy.len(), 1);
    assert!(privacy[0].seed);
    assert!(catalog.get_mitigations_for(privacy[0].id).unwrap().is_empty());
    assert_eq!(catalog.get_weakness(cwe(999)).unwrap_err().code(), "NOT_FOUND");
}

#[test]
fn seed_mitigation_links_agree_in_both_directions() {
    let catalog = seed::seed_catalog();
    for w in catalog.weaknesses() {
        let forward: BTreeSet<MitigationId> = w.potential_mitigations.iter().copied().collect();
        let backward: BTreeSet<MitigationId> =
            catalog.get_mitigations_for(w.id).unwrap().iter().map(|m| m.id).collect();
        assert_eq!(forward, backward, "{}", w.id);
    }
}

#[test]
fn seed_documents_round_trip_through_the_writer() {
    let catalog = seed::seed_catalog();
    let reloaded = load_catalog(
        catalog.version(),
        &[catalog.weaknesses_document(), catalog.mitigations_document()],
    )
    .unwrap();
    assert_eq!(reloaded, catalog);
    assert_eq!(catalog.weaknesses_document(), seed::SEED_WEAKNESSES);
    assert_eq!(catalog.mitigations_document(), seed::SEED_MITIGATIONS);
}

#[test]
fn duplicate_dangling_and_cyclic_corpora_fail() {
    let dup = json!([weakness(100, "DataHandling", vec![], vec![]), weakness(100, "DataHandling", vec![], vec![])]);
    assert_eq!(load_catalog("t", &[dup.to_string()]).unwrap_err().code(), "DUPLICATE_ID");

    let dangling = json!([weakness(1, "DataHandling", vec![json!({"target": "AI-CWE-2", "kind": "RelatedTo"})], vec![])]);
    assert_eq!(load_catalog("t", &[dangling.to_string()]).unwrap_err().code(), "DANGLING_REF");

    let cycle = json!([
        weakness(1, "DataHandling", vec![json!({"target": "AI-CWE-2", "kind": "ParentOf"})], vec![]),
        weakness(2, "DataHandling", vec![json!({"target": "AI-CWE-1", "kind": "ParentOf"})], vec![]),
    ]);
    assert_eq!(load_catalog("t", &[cycle.to_string()]).unwrap_err().code(), "RELATIONSHIP_CYCLE");

    let redundant_edges = json!([
        weakness(1, "DataHandling", vec![json!({"target": "AI-CWE-2", "kind": "ParentOf"})], vec![]),
        weakness(2, "DataHandling", vec![json!({"target": "AI-CWE-1", "kind": "ChildOf"})], vec![]),
        weakness(3, "DataHandling", vec![json!({"target": "AI-CWE-2", "kind": "ChildOf"})], vec![]),
        weakness(4, "DataHandling", vec![json!({"target": "AI-CWE-3", "kind": "ParentOf"})], vec![]),
    ]);
    assert!(load_catalog("t", &[redundant_edges.to_string()]).is_ok());
    let closing = json!([
        weakness(1, "DataHandling", vec![json!({"target": "AI-CWE-3", "kind": "ChildOf"})], vec![]),
        weakness(2, "DataHandling", vec![json!({"target": "AI-CWE-1", "kind": "ChildOf"})], vec![]),
        weakness(3, "DataHandling", vec![json!({"target": "AI-CWE-2", "kind": "ChildOf"})], vec![]),
    ]);
    assert_eq!(load_catalog("t", &[closing.to_string()]).unwrap_err().code(), "RELATIONSHIP_CYCLE");

    assert_eq!(load_catalog("t", &["{".to_string()]).unwrap_err().code(), "MALFORMED_DOCUMENT");
}

/// Edges as (from, to, kind index), always pointing from a lower id to a higher one.
fn forward_edges(n: u32) -> impl Strategy<Value = Vec<(u32, u32, u8)>> {
    prop::collection::vec((1..=n, 1..=n, 0u8..3), 0..(n as usize * 2))
        .prop_map(|edges| edges.into_iter().filter(|(a, b, _)| a < b).collect())
}

fn corpus(n: u32, classes: &[usize], edges: &[(u32, u32, u8)]) -> Vec<Value> {
    (1..=n)
        .map(|i| {
            let rels: Vec<Value> = edges
                .iter()
                .filter(|(a, _, _)| *a == i)
                .map(|(_, b, k)| {
                    let kind = if *k == 1 { "RelatedTo" } else { "ParentOf" };
                    json!({"target": format!("AI-CWE-{b}"), "kind": kind})
                })
                .collect();
            weakness(i, CLASSES[classes[(i - 1) as usize] % 4], rels, vec![])
        })
        .collect()
}

/// Descendants over ParentOf edges by naive fixpoint.
fn closure_oracle(start: u32, edges: &[(u32, u32, u8)]) -> BTreeSet<u32> {
    let mut reach = BTreeSet::new();
    let mut frontier = vec![start];
    while let Some(x) = frontier.pop() {
        for (a, b, k) in edges {
            if *a == x && *k != 1 && *b != start && reach.insert(*b) {
                frontier.push(*b);
            }
        }
    }
    reach
}

proptest! {
    #[test]
    fn classes_partition_any_catalog(
        (n, classes, edges) in (1u32..12).prop_flat_map(|n| (Just(n), prop::collection::vec(0usize..4, n as usize), forward_edges(n)))
    ) {
        let catalog = load_catalog("t", &[Value::Array(corpus(n, &classes, &edges)).to_string()]).unwrap();
        let mut seen = BTreeSet::new();
        for class in WeaknessClass::ALL {
            let listed = catalog.list_by_class(class);
            prop_assert!(listed.windows(2).all(|w| w[0].id < w[1].id));
            for e in listed {
                prop_assert_eq!(e.weakness_class, class);
                prop_assert!(seen.insert(e.id));
            }
        }
        prop_assert_eq!(seen.len(), n as usize);
    }

    #[test]
    fn closure_matches_the_naive_fixpoint(
        (n, edges) in (1u32..12).prop_flat_map(|n| (Just(n), forward_edges(n)))
    ) {
        let catalog = load_catalog("t", &[Value::Array(corpus(n, &vec![0; n as usize], &edges)).to_string()]).unwrap();
        for i in 1..=n {
            let got: BTreeSet<u32> = catalog.resolve_relationships(cwe(i)).unwrap().iter().map(|id| id.number()).collect();
            prop_assert_eq!(got, closure_oracle(i, &edges));
        }
    }

    #[test]
    fn mitigation_targets_drive_lookup(targets in prop::collection::vec(prop::collection::btree_set(1u32..6, 0..4), 1..5)) {
        let mut docs: Vec<Value> = (1..6).map(|i| weakness(i, "DataHandling", vec![], vec![])).collect();
        for (m, ts) in targets.iter().enumerate() {
            docs.push(mitigation(m as u32 + 1, ts.iter().map(|t| format!("AI-CWE-{t}")).collect()));
        }
        let catalog = load_catalog("t", &[Value::Array(docs).to_string()]).unwrap();
        for w in 1..6u32 {
            let got: Vec<u32> = catalog.get_mitigations_for(cwe(w)).unwrap().iter().map(|m| m.id.number()).collect();
            let want: Vec<u32> = targets.iter().enumerate().filter(|(_, ts)| ts.contains(&w)).map(|(m, _)| m as u32 + 1).collect();
            prop_assert_eq!(got, want);
        }
    }
}
