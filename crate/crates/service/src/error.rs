use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::Value;

use aivd_core::aibom::AibomError;
use aivd_core::catalog::CatalogError;
use aivd_core::ids::IdError;
use aivd_core::record::RecordError;
use aivd_core::registry::RegistryError;
use aivd_core::severity::{ScoreError, VectorError};

/// The body of every non-success response.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            details: None,
        }
    }

    pub fn status(&self) -> StatusCode {
        status_for(&self.code)
    }
}

/// HTTP status for an error code.
pub fn status_for(code: &str) -> StatusCode {
    match code {
        "VALIDATION_FAILED" => StatusCode::UNPROCESSABLE_ENTITY,
        "NOT_FOUND" => StatusCode::NOT_FOUND,
        "METHOD_NOT_ALLOWED" => StatusCode::METHOD_NOT_ALLOWED,
        "ILLEGAL_TRANSITION" | "DUPLICATE_RECORD" | "DUPLICATE_CNA" | "CLOCK_REGRESSION" | "PATCH_CONFLICT" => {
            StatusCode::CONFLICT
        }
        "UNKNOWN_CNA" | "YEAR_OUT_OF_RANGE" | "MISSING_HEADER" | "MISSING_METRIC" | "DUPLICATE_METRIC"
        | "OUT_OF_RANGE" => StatusCode::BAD_REQUEST,
        c if c.starts_with("BAD_") || c.starts_with("MALFORMED_") => StatusCode::BAD_REQUEST,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

impl From<RegistryError> for ApiError {
    fn from(e: RegistryError) -> Self {
        let mut api = ApiError::new(e.code(), e.to_string());
        if let RegistryError::ValidationFailed(report) = &e {
            api.message = format!("{} error(s) in validation", report.errors().count());
            api.details = serde_json::to_value(report).ok();
        }
        api
    }
}

macro_rules! from_coded {
    ($($t:ty),*) => {$(
        impl From<$t> for ApiError {
            fn from(e: $t) -> Self {
                ApiError::new(e.code(), e.to_string())
            }
        }
    )*};
}

from_coded!(RecordError, CatalogError, AibomError, IdError, VectorError, ScoreError);
