use std::sync::{PoisonError, RwLockReadGuard, RwLockWriteGuard};

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use aivd_core::aibom::{parse_aibom, serialize_aibom, validate_aibom};
use aivd_core::catalog::WeaknessClass;
use aivd_core::ids::{AiCveId, AiCweId, MitigationId};
use aivd_core::record::{parse_record, serialize_record, LifecycleStatus, VulnerabilityRecord};
use aivd_core::registry::{parse_filter_params, CnaRegistration, Registry};
use aivd_core::severity::{apply_environmental, compute_score, parse_vector, EnvironmentalContext, Trigger};

use crate::error::ApiError;
use crate::SharedRegistry;

type ApiResult = Result<Response, ApiError>;

pub(crate) fn api_routes() -> Router<SharedRegistry> {
    Router::new()
        .route("/records", post(submit).get(search))
        .route("/records/{id}", get(show).patch(update))
        .route("/records/{id}/status", post(transition))
        .route("/records/{id}/rescore", post(rescore))
        .route("/records/{id}/aibom", get(record_aibom))
        .route("/catalog/weaknesses", get(list_weaknesses))
        .route("/catalog/weaknesses/{id}", get(show_weakness))
        .route("/catalog/weaknesses/{id}/mitigations", get(weakness_mitigations))
        .route("/catalog/mitigations/{id}", get(show_mitigation))
        .route("/score", post(score))
        .route("/aibom/validate", post(validate_aibom_doc))
        .route("/cnas", post(register_cna).get(list_cnas))
}

fn read(reg: &SharedRegistry) -> RwLockReadGuard<'_, Registry> {
    reg.read().unwrap_or_else(PoisonError::into_inner)
}

fn write(reg: &SharedRegistry) -> RwLockWriteGuard<'_, Registry> {
    reg.write().unwrap_or_else(PoisonError::into_inner)
}

fn canonical(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn record_response(status: StatusCode, record: &VulnerabilityRecord) -> Response {
    canonical(status, serialize_record(record))
}

fn utf8(body: &Bytes) -> Result<&str, ApiError> {
    std::str::from_utf8(body).map_err(|e| ApiError::new("MALFORMED_DOCUMENT", format!("body is not UTF-8: {e}")))
}

fn json_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| {
        let code = if e.is_syntax() || e.is_eof() { "MALFORMED_DOCUMENT" } else { "BAD_FIELD_TYPE" };
        ApiError::new(code, e.to_string())
    })
}

fn header_text<'a>(headers: &'a HeaderMap, name: &str) -> Option<&'a str> {
    headers
        .get(name)
        .and_then(|v| v.to_str().ok())
        .map(str::trim)
        .filter(|v| !v.is_empty())
}

fn record_id(text: &str) -> Result<AiCveId, ApiError> {
    Ok(text.parse::<AiCveId>()?)
}

fn nonblank(field: &str, value: String) -> Result<String, ApiError> {
    if value.trim().is_empty() {
        return Err(ApiError::new("BAD_FIELD_TYPE", format!("{field} must not be blank")));
    }
    Ok(value)
}

fn query_pairs(raw: Option<String>) -> Result<Vec<(String, String)>, ApiError> {
    serde_urlencoded::from_str(raw.as_deref().unwrap_or_default())
        .map_err(|e| ApiError::new("BAD_FILTER", format!("query string: {e}")))
}

async fn submit(State(reg): State<SharedRegistry>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let cna = header_text(&headers, "x-cna-id")
        .ok_or_else(|| ApiError::new("MISSING_HEADER", "X-CNA-ID header is required"))?
        .to_string();
    let draft = parse_record(utf8(&body)?)?;
    let stored = write(&reg).submit(draft, &cna)?;
    Ok(record_response(StatusCode::CREATED, &stored))
}

async fn show(State(reg): State<SharedRegistry>, Path(id): Path<String>) -> ApiResult {
    let id = record_id(&id)?;
    Ok(record_response(StatusCode::OK, read(&reg).get(id)?))
}

async fn update(
    State(reg): State<SharedRegistry>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let id = record_id(&id)?;
    let fields: Map<String, Value> = json_body(&body)?;
    let actor = header_text(&headers, "x-actor").unwrap_or("api").to_string();
    let updated = write(&reg).update_fields(id, fields, &actor)?;
    Ok(record_response(StatusCode::OK, &updated))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StatusBody {
    to: String,
    actor: String,
    #[serde(default)]
    note: String,
}

async fn transition(State(reg): State<SharedRegistry>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let id = record_id(&id)?;
    let body: StatusBody = json_body(&body)?;
    let to = LifecycleStatus::parse(&body.to)
        .ok_or_else(|| ApiError::new("BAD_STATUS", format!("unknown status {:?}", body.to)))?;
    let actor = nonblank("actor", body.actor)?;
    let updated = write(&reg).transition_status(id, to, &actor, &body.note)?;
    Ok(record_response(StatusCode::OK, &updated))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RescoreBody {
    vector: String,
    trigger: String,
    actor: String,
    #[serde(default)]
    note: String,
}

async fn rescore(State(reg): State<SharedRegistry>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let id = record_id(&id)?;
    let body: RescoreBody = json_body(&body)?;
    let vector = parse_vector(&body.vector)?;
    let trigger = Trigger::parse(&body.trigger)
        .ok_or_else(|| ApiError::new("BAD_TRIGGER", format!("unknown trigger {:?}", body.trigger)))?;
    let actor = nonblank("actor", body.actor)?;
    let updated = write(&reg).rescore(id, &vector, trigger, &actor, &body.note)?;
    Ok(record_response(StatusCode::OK, &updated))
}

async fn search(State(reg): State<SharedRegistry>, RawQuery(raw): RawQuery) -> ApiResult {
    let filter = parse_filter_params(query_pairs(raw)?).map_err(|e| ApiError::new("BAD_FILTER", e))?;
    let page = read(&reg).query(&filter)?;
    Ok(Json(page).into_response())
}

async fn record_aibom(State(reg): State<SharedRegistry>, Path(id): Path<String>) -> ApiResult {
    let id = record_id(&id)?;
    let reg = read(&reg);
    let doc = reg
        .get(id)?
        .ai_system
        .aibom
        .as_ref()
        .ok_or_else(|| ApiError::new("NOT_FOUND", format!("{id} has no embedded AIBOM")))?;
    Ok(canonical(StatusCode::OK, serialize_aibom(doc)))
}

async fn list_weaknesses(State(reg): State<SharedRegistry>, RawQuery(raw): RawQuery) -> ApiResult {
    let mut class = None;
    for (key, value) in query_pairs(raw)? {
        match key.as_str() {
            "class" => {
                class = Some(
                    WeaknessClass::parse(&value)
                        .ok_or_else(|| ApiError::new("BAD_FILTER", format!("unknown class {value:?}")))?,
                )
            }
            other => return Err(ApiError::new("BAD_FILTER", format!("unknown parameter {other:?}"))),
        }
    }
    let reg = read(&reg);
    let entries: Vec<_> = match class {
        Some(class) => reg.catalog().list_by_class(class),
        None => reg.catalog().weaknesses().collect(),
    };
    Ok(Json(entries).into_response())
}

async fn show_weakness(State(reg): State<SharedRegistry>, Path(id): Path<String>) -> ApiResult {
    let id: AiCweId = id.parse()?;
    Ok(Json(read(&reg).catalog().get_weakness(id)?).into_response())
}

async fn weakness_mitigations(State(reg): State<SharedRegistry>, Path(id): Path<String>) -> ApiResult {
    let id: AiCweId = id.parse()?;
    Ok(Json(read(&reg).catalog().get_mitigations_for(id)?).into_response())
}

async fn show_mitigation(State(reg): State<SharedRegistry>, Path(id): Path<String>) -> ApiResult {
    let id: MitigationId = id.parse()?;
    Ok(Json(read(&reg).catalog().get_mitigation(id)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreBody {
    vector: String,
    #[serde(default)]
    env: Option<EnvironmentalContext>,
}

async fn score(State(reg): State<SharedRegistry>, body: Bytes) -> ApiResult {
    let body: ScoreBody = json_body(&body)?;
    let vector = parse_vector(&body.vector)?;
    let now = read(&reg).clock().now();
    let score = match body.env {
        Some(env) => apply_environmental(&vector, &env, now),
        None => compute_score(&vector, now),
    };
    Ok(Json(score).into_response())
}

async fn validate_aibom_doc(body: Bytes) -> ApiResult {
    let doc = parse_aibom(utf8(&body)?)?;
    Ok(Json(validate_aibom(&doc)).into_response())
}

async fn register_cna(State(reg): State<SharedRegistry>, body: Bytes) -> ApiResult {
    let registration: CnaRegistration = json_body(&body)?;
    write(&reg).register_cna(registration.clone())?;
    Ok((StatusCode::CREATED, Json(registration)).into_response())
}

async fn list_cnas(State(reg): State<SharedRegistry>) -> ApiResult {
    let reg = read(&reg);
    Ok(Json(reg.cnas().collect::<Vec<_>>()).into_response())
}
