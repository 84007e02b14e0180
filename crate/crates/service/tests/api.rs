use std::collections::BTreeSet;
use std::sync::{Arc, RwLock};

use aivd_core::record::serialize_record;
use aivd_core::registry::{CnaRegistration, ManualClock, Registry, YearRange};
use aivd_core::seed;
use aivd_core::testing;
use aivd_service::{router, SharedRegistry};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::{TimeZone, Utc};
use http_body_util::BodyExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

fn shared() -> SharedRegistry {
    shared_at(2024, 4)
}

fn shared_at(year: i32, month: u32) -> SharedRegistry {
    let clock = Arc::new(ManualClock::new(Utc.with_ymd_and_hms(year, month, 1, 0, 0, 0).unwrap()));
    let mut reg = Registry::in_memory(seed::seed_catalog(), clock);
    reg.register_cna(CnaRegistration {
        cna_id: "test-cna".into(),
        name: "Test CNA".into(),
        allowed_year_range: YearRange { from: 2020, to: 2030 },
    })
    .unwrap();
    reg.load_seed("seed").unwrap();
    Arc::new(RwLock::new(reg))
}

async fn call(app: &Router, method: &str, uri: &str, headers: &[(&str, &str)], body: impl Into<Body>) -> (StatusCode, String) {
    let mut req = Request::builder().method(method).uri(uri);
    for (k, v) in headers {
        req = req.header(*k, *v);
    }
    let resp = app.clone().oneshot(req.body(body.into()).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    call(app, "GET", uri, &[], Body::empty()).await
}

async fn post_json(app: &Router, uri: &str, body: Value) -> (StatusCode, String) {
    call(app, "POST", uri, &[("content-type", "application/json")], body.to_string()).await
}

fn error_code(body: &str) -> String {
    let v: Value = serde_json::from_str(body).unwrap();
    assert!(v["message"].is_string());
    v["code"].as_str().unwrap().to_string()
}

fn draft_text() -> String {
    let mut record = seed::seed_record();
    record.id = None;
    record.status = None;
    serialize_record(&record)
}

#[tokio::test]
async fn seed_record_is_served_canonically() {
    let app = router(shared());
    let (status, body) = get(&app, "/api/v1/records/AI-CVE-2024-1234").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, seed::SEED_RECORD);
    assert_eq!(get(&app, "/api/v1/records/AI-CVE-2024-1234").await.1, body);
}

#[tokio::test]
async fn unknown_and_malformed_ids() {
    let app = router(shared());
    let (status, body) = get(&app, "/api/v1/records/AI-CVE-2024-9999").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::NOT_FOUND, "NOT_FOUND"));
    let (status, body) = get(&app, "/api/v1/records/CVE-2024-1234").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "BAD_ID"));
    let (status, body) = get(&app, "/api/v1/nowhere").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::NOT_FOUND, "NOT_FOUND"));
    let (status, body) = call(&app, "DELETE", "/api/v1/records/AI-CVE-2024-1234", &[], Body::empty()).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::METHOD_NOT_ALLOWED, "METHOD_NOT_ALLOWED"));
}

#[tokio::test]
async fn anchor_vector_scores_nine_critical() {
    let app = router(shared());
    let (status, body) = post_json(&app, "/api/v1/score", json!({"vector": seed::ANCHOR_VECTOR})).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["value"], json!(9.0));
    assert_eq!(v["band"], "Critical");
    assert!(body.contains("\"value\":9.0"));

    let (_, body) = post_json(&app, "/api/v1/score", json!({"vector": seed::ANCHOR_VECTOR, "env": {"air": "High"}})).await;
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["value"], json!(9.8));

    let (status, body) = post_json(&app, "/api/v1/score", json!({"vector": "AIVSS:1.0/AV:N"})).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "MISSING_METRIC"));
}

#[tokio::test]
async fn submission_rules() {
    let app = router(shared());
    let (status, body) = call(&app, "POST", "/api/v1/records", &[], draft_text()).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "MISSING_HEADER"));

    let (status, body) = call(&app, "POST", "/api/v1/records", &[("x-cna-id", "nobody")], draft_text()).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "UNKNOWN_CNA"));

    let (status, body) = call(&app, "POST", "/api/v1/records", &[("x-cna-id", "test-cna")], "{oops").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "MALFORMED_DOCUMENT"));

    let invalid = json!({"description": "d", "report_date": "2024-03-25", "ai_system": {"name": "m", "type": "CNN"}});
    let (status, body) = call(&app, "POST", "/api/v1/records", &[("x-cna-id", "test-cna")], invalid.to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["code"], "VALIDATION_FAILED");
    assert!(v["details"]["findings"].as_array().unwrap().iter().any(|f| f["path"] == "reported_by"));

    let (status, body) = call(&app, "POST", "/api/v1/records", &[("x-cna-id", "test-cna")], draft_text()).await;
    assert_eq!(status, StatusCode::CREATED);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["id"], "AI-CVE-2024-1235");
    assert_eq!(v["status"], "Reported");
    assert_eq!(get(&app, "/api/v1/records/AI-CVE-2024-1235").await.1, body);
}

#[tokio::test]
async fn lifecycle_over_http() {
    let app = router(shared());
    let uri = "/api/v1/records/AI-CVE-2024-1234/status";
    let (status, body) = post_json(&app, uri, json!({"to": "Resolved", "actor": "t"})).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::CONFLICT, "ILLEGAL_TRANSITION"));
    let (status, body) = post_json(&app, uri, json!({"to": "Open", "actor": "t"})).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "BAD_STATUS"));
    for to in ["Triaged", "Confirmed", "Disclosed"] {
        let (status, body) = post_json(&app, uri, json!({"to": to, "actor": "triager", "note": "ok"})).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["status"], to);
    }

    let rescore = "/api/v1/records/AI-CVE-2024-1234/rescore";
    let vector = seed::ANCHOR_VECTOR.replace("MI:H", "MI:L");
    let (status, body) = post_json(&app, rescore, json!({"vector": vector, "trigger": "model-update", "actor": "scanner"})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let v: Value = serde_json::from_str(&body).unwrap();
    let history = v["severity"]["history"].as_array().unwrap();
    assert_eq!(history.len(), 2);
    assert_eq!(history[1]["score"]["value"], json!(8.1));
    assert_eq!(history[1]["trigger"], "ModelUpdate");

    let (status, body) = call(
        &app,
        "PATCH",
        "/api/v1/records/AI-CVE-2024-1234",
        &[("x-actor", "editor")],
        json!({"impact": "Revised impact statement"}).to_string(),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["impact"], "Revised impact statement");
    let (status, body) = call(&app, "PATCH", "/api/v1/records/AI-CVE-2024-1234", &[], json!({"status": "Reported"}).to_string()).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "BAD_UPDATE"));
    let (status, body) = call(&app, "PATCH", "/api/v1/records/AI-CVE-2024-1234", &[], json!({"references": []}).to_string()).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::UNPROCESSABLE_ENTITY, "VALIDATION_FAILED"));
}

#[tokio::test]
async fn search_on_the_seed_store() {
    let app = router(shared());
    let (status, body) = get(&app, "/api/v1/records?vendor=Google&min_score=9.0").await;
    assert_eq!(status, StatusCode::OK);
    let page: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(page["total"], 1);
    assert_eq!(page["items"][0]["id"], "AI-CVE-2024-1234");
    let (_, body) = get(&app, "/api/v1/records?vendor=Google&min_score=9.1").await;
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["total"], 0);
    let (status, body) = get(&app, "/api/v1/records?min_score=abc").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "BAD_FILTER"));
    let (status, body) = get(&app, "/api/v1/records?page=0").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "BAD_FILTER"));
}

#[tokio::test]
async fn search_matches_brute_force_with_noise() {
    let shared = shared_at(2025, 1);
    {
        let mut reg = shared.write().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let draft = testing::draft(&mut rng, reg.catalog());
            reg.submit(draft, "test-cna").unwrap();
        }
    }
    let expected: BTreeSet<String> = shared
        .read()
        .unwrap()
        .state()
        .records()
        .filter(|r| r.vendors.iter().any(|v| v.to_lowercase().contains("google")))
        .filter(|r| r.severity.current().is_some_and(|s| s.value.as_f64() >= 9.0))
        .map(|r| r.id.unwrap().to_string())
        .collect();
    let app = router(shared);
    let (_, body) = get(&app, "/api/v1/records?vendor=Google&min_score=9.0&page_size=100").await;
    let page: Value = serde_json::from_str(&body).unwrap();
    let got: BTreeSet<String> = page["items"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap().to_string()).collect();
    assert_eq!(got, expected);
    assert!(got.contains("AI-CVE-2024-1234"));
}

#[tokio::test]
async fn catalog_routes() {
    let app = router(shared());
    let (status, body) = get(&app, "/api/v1/catalog/weaknesses/AI-CWE-100").await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["name"], "Inadequate Input Filtering");
    assert_eq!(v["modes_of_introduction"], json!(["Inference"]));

    let (_, body) = get(&app, "/api/v1/catalog/weaknesses/AI-CWE-100/mitigations").await;
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["name"], "Adversarial Example Detection");

    let (_, body) = get(&app, "/api/v1/catalog/weaknesses?class=privacy-safeguard").await;
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["id"], "AI-CWE-103");
    let (_, body) = get(&app, "/api/v1/catalog/weaknesses").await;
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap().as_array().unwrap().len(), 4);

    let (status, body) = get(&app, "/api/v1/catalog/mitigations/MIT-0001").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["type"], "Proactive");

    let (status, body) = get(&app, "/api/v1/catalog/weaknesses/AI-CWE-999").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::NOT_FOUND, "NOT_FOUND"));
    let (status, body) = get(&app, "/api/v1/catalog/weaknesses?class=unknown").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "BAD_FILTER"));
}

#[tokio::test]
async fn aibom_routes() {
    let app = router(shared());
    let (status, body) = get(&app, "/api/v1/records/AI-CVE-2024-1234/aibom").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, seed::SEED_AIBOM);

    let (status, body) = call(&app, "POST", "/api/v1/aibom/validate", &[], seed::SEED_AIBOM).await;
    assert_eq!(status, StatusCode::OK);
    let report: Value = serde_json::from_str(&body).unwrap();
    assert!(report["findings"].as_array().unwrap().iter().all(|f| f["level"] == "Warning"));

    let (_, body) = call(&app, "POST", "/api/v1/aibom/validate", &[], json!({"meta": {}}).to_string()).await;
    let report: Value = serde_json::from_str(&body).unwrap();
    assert!(report["findings"].as_array().unwrap().iter().any(|f| f["path"] == "meta.creator"));

    let (status, body) = call(&app, "POST", "/api/v1/aibom/validate", &[], "[1]").await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::BAD_REQUEST, "MALFORMED_DOCUMENT"));
}

#[tokio::test]
async fn cna_registration_route() {
    let app = router(shared());
    let cna = json!({"cna_id": "acme", "name": "Acme", "allowed_year_range": {"from": 2024, "to": 2025}});
    let (status, _) = post_json(&app, "/api/v1/cnas", cna.clone()).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, body) = post_json(&app, "/api/v1/cnas", cna).await;
    assert_eq!((status, error_code(&body).as_str()), (StatusCode::CONFLICT, "DUPLICATE_CNA"));
    let (_, body) = get(&app, "/api/v1/cnas").await;
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap().as_array().unwrap().len(), 2);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn parallel_posts_get_distinct_ids() {
    const N: usize = 32;
    let shared = shared();
    let app = router(shared.clone());
    let tasks: Vec<_> = (0..N)
        .map(|_| {
            let app = app.clone();
            tokio::spawn(async move {
                let (status, body) = call(&app, "POST", "/api/v1/records", &[("x-cna-id", "test-cna")], draft_text()).await;
                assert_eq!(status, StatusCode::CREATED);
                serde_json::from_str::<Value>(&body).unwrap()["id"].as_str().unwrap().to_string()
            })
        })
        .collect();
    let mut ids = BTreeSet::new();
    for task in tasks {
        ids.insert(task.await.unwrap());
    }
    assert_eq!(ids.len(), N);
    let reg = shared.read().unwrap();
    let events = reg.events();
    assert!(events.iter().enumerate().all(|(i, e)| e.sequence == i as u64 + 1));
    assert_eq!(events.len(), N + 1);
}
