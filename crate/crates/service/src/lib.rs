//! HTTP API over an AI vulnerability registry.
//!
//! All routes live under `/api/v1`. Record and AIBOM bodies use the canonical
//! document formats byte for byte; every failure is an [`ApiError`] body.

mod error;
mod routes;

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::http::{Method, Uri};
use axum::Router;
use thiserror::Error;

use aivd_core::registry::{Registry, RegistryError, SystemClock};

pub use error::{status_for, ApiError};

pub const API_PREFIX: &str = "/api/v1";
pub const DEFAULT_ADDR: &str = "127.0.0.1:8640";
pub const DATA_DIR_ENV: &str = "AIVD_DATA_DIR";
pub const ADDR_ENV: &str = "AIVD_ADDR";
pub const DEFAULT_DATA_DIR: &str = "aivd-data";

/// Registry handle shared by all request handlers.
pub type SharedRegistry = Arc<RwLock<Registry>>;

pub fn router(registry: SharedRegistry) -> Router {
    Router::new()
        .nest(API_PREFIX, routes::api_routes())
        .fallback(|uri: Uri| async move { ApiError::new("NOT_FOUND", format!("no route for {uri}")) })
        .method_not_allowed_fallback(|method: Method, uri: Uri| async move {
            ApiError::new("METHOD_NOT_ALLOWED", format!("{method} is not allowed on {uri}"))
        })
        .with_state(registry)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServeConfig {
    pub data_dir: PathBuf,
    pub addr: String,
}

impl ServeConfig {
    /// Reads `AIVD_DATA_DIR` and `AIVD_ADDR`, falling back to defaults.
    pub fn from_env() -> Self {
        Self {
            data_dir: std::env::var_os(DATA_DIR_ENV).map_or_else(|| DEFAULT_DATA_DIR.into(), PathBuf::from),
            addr: std::env::var(ADDR_ENV).unwrap_or_else(|_| DEFAULT_ADDR.to_string()),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot bind {addr}: {reason}")]
    BindFailure { addr: String, reason: String },
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::BindFailure { .. } => "BIND_FAILURE",
            Self::Registry(e) => e.code(),
        }
    }
}

/// Opens the store, binds, and serves until `shutdown` resolves, then
/// flushes the event log. `on_ready` receives the bound address.
pub async fn serve(
    config: ServeConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
    on_ready: impl FnOnce(SocketAddr),
) -> Result<(), ServiceError> {
    let registry = Registry::open(&config.data_dir, Arc::new(SystemClock))?;
    let shared: SharedRegistry = Arc::new(RwLock::new(registry));
    let bind_failure = |e: std::io::Error| ServiceError::BindFailure {
        addr: config.addr.clone(),
        reason: e.to_string(),
    };
    let listener = tokio::net::TcpListener::bind(&config.addr).await.map_err(bind_failure)?;
    on_ready(listener.local_addr().map_err(bind_failure)?);
    axum::serve(listener, router(shared.clone()))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(bind_failure)?;
    let mut registry = shared.write().unwrap_or_else(std::sync::PoisonError::into_inner);
    registry.sync()?;
    Ok(())
}

/// Runs [`serve`] on a fresh runtime until Ctrl-C or SIGTERM.
pub fn serve_blocking(config: ServeConfig, on_ready: impl FnOnce(SocketAddr)) -> Result<(), ServiceError> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| ServiceError::BindFailure {
            addr: config.addr.clone(),
            reason: e.to_string(),
        })?;
    runtime.block_on(serve(config, shutdown_signal(), on_ready))
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        () = ctrl_c => {}
        () = terminate => {}
    }
}
