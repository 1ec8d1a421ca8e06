//! The report server over HTTP.
//!
//! | route | |
//! |---|---|
//! | `POST /acsnservice/submit` | binary submit body, finder named by `X-Finder-Identity` |
//! | `POST /acsnservice/fetch` | JSON fetch, owner named by `Authorization` |
//! | `POST /admin/purge` | drop reports past retention |
//! | `GET /admin/correlate?window=S` | owner pairs linkable from metadata |
//! | `GET /admin/stats` | counts and current time |
//! | `POST /admin/snapshot` | write the store to the configured file |
//! | `POST /admin/clock` | set a manual clock, `{"nowMs": ...}` |
//! | `GET /healthz` | liveness |

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use findnet_core::clock::{Clock, ManualClock, SystemClock};
use findnet_core::store::{CorrelationFinding, ReportStore, SnapshotError, StoreConfig};
use findnet_core::wire::{
    parse_fetch_request, ClockUpdate, FetchError, FetchResponse, PurgeReply, ServerStats, SubmitError, SubmitReply,
};
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

pub const FINDER_HEADER: &str = "x-finder-identity";
pub const ANONYMOUS_FINDER: &str = "anonymous";

#[derive(Debug, Error)]
pub enum ApiError {
    #[error(transparent)]
    Submit(#[from] SubmitError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("{0}")]
    Conflict(&'static str),
    #[error("snapshot: {0}")]
    Snapshot(#[from] SnapshotError),
    #[error("snapshot: {0}")]
    Io(#[from] std::io::Error),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self {
            ApiError::Submit(_) | ApiError::Fetch(_) => StatusCode::BAD_REQUEST,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Snapshot(_) | ApiError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

#[derive(Clone)]
pub enum ServerClock {
    System,
    Manual(Arc<ManualClock>),
}

impl ServerClock {
    pub fn as_clock(&self) -> Arc<dyn Clock> {
        match self {
            ServerClock::System => Arc::new(SystemClock),
            ServerClock::Manual(c) => c.clone(),
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<ReportStore>,
    clock: Arc<dyn Clock>,
    manual: Option<Arc<ManualClock>>,
    snapshot: Option<PathBuf>,
}

impl AppState {
    pub fn new(store: Arc<ReportStore>, clock: ServerClock, snapshot: Option<PathBuf>) -> Self {
        let manual = match &clock {
            ServerClock::Manual(c) => Some(c.clone()),
            ServerClock::System => None,
        };
        Self { store, clock: clock.as_clock(), manual, snapshot }
    }

    pub fn with_config(config: StoreConfig, clock: ServerClock) -> Self {
        Self::new(Arc::new(ReportStore::new(config)), clock, None)
    }

    pub fn now_ms(&self) -> i64 {
        self.clock.now_ms()
    }

    /// Loads the snapshot file if one is configured and exists.
    pub fn restore(&self) -> Result<usize, ApiError> {
        match &self.snapshot {
            Some(path) if path.exists() => Ok(self.store.load_snapshot(BufReader::new(File::open(path)?))?),
            _ => Ok(0),
        }
    }

    /// Writes the store to the snapshot file, via a temporary sibling.
    pub fn save(&self) -> Result<Option<&Path>, ApiError> {
        let Some(path) = &self.snapshot else { return Ok(None) };
        let tmp = path.with_extension("tmp");
        let mut out = BufWriter::new(File::create(&tmp)?);
        self.store.write_snapshot(&mut out)?;
        out.flush()?;
        drop(out);
        std::fs::rename(&tmp, path)?;
        Ok(Some(path))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/acsnservice/submit", post(submit))
        .route("/acsnservice/fetch", post(fetch))
        .route("/admin/purge", post(purge))
        .route("/admin/correlate", get(correlate))
        .route("/admin/stats", get(stats))
        .route("/admin/snapshot", post(snapshot))
        .route("/admin/clock", post(set_clock))
        .route("/healthz", get(|| async { "ok" }))
        .with_state(state)
}

fn header<'a>(headers: &'a HeaderMap, name: &str) -> Option<&'a str> {
    headers.get(name).and_then(|v| v.to_str().ok()).map(str::trim).filter(|v| !v.is_empty())
}

async fn submit(State(st): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Json<SubmitReply>, ApiError> {
    let finder = header(&headers, FINDER_HEADER).unwrap_or(ANONYMOUS_FINDER);
    let stored = st.store.submit(&body, finder, st.now_ms())?;
    tracing::debug!(finder, stored, "submit");
    Ok(Json(SubmitReply { stored }))
}

async fn fetch(State(st): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Json<FetchResponse>, ApiError> {
    let req = parse_fetch_request(&body)?;
    req.validate()?;
    let owner = header(&headers, "authorization");
    let resp = st.store.fetch(&req, owner, st.now_ms());
    tracing::debug!(results = resp.results.len(), "fetch");
    Ok(Json(resp))
}

async fn purge(State(st): State<AppState>) -> Json<PurgeReply> {
    let purged = st.store.purge_expired(st.now_ms());
    Json(PurgeReply { purged, remaining: st.store.len() })
}

#[derive(Debug, Deserialize)]
struct CorrelateParams {
    window: u32,
}

async fn correlate(State(st): State<AppState>, Query(p): Query<CorrelateParams>) -> Json<Vec<CorrelationFinding>> {
    let store = st.store.clone();
    let findings = tokio::task::spawn_blocking(move || store.correlate(p.window)).await.expect("correlation task");
    Json(findings)
}

async fn stats(State(st): State<AppState>) -> Json<ServerStats> {
    Json(ServerStats {
        reports: st.store.len(),
        fetches: st.store.fetch_log().len(),
        record_owner_tokens: st.store.config().record_owner_tokens,
        now_ms: st.now_ms(),
        manual_clock: st.manual.is_some(),
    })
}

async fn snapshot(State(st): State<AppState>) -> Result<Json<serde_json::Value>, ApiError> {
    let st2 = st.clone();
    let written = tokio::task::spawn_blocking(move || st2.save().map(|p| p.map(Path::to_path_buf)))
        .await
        .expect("snapshot task")?;
    let path = written.ok_or(ApiError::Conflict("server was started without a snapshot path"))?;
    Ok(Json(json!({ "path": path, "reports": st.store.len() })))
}

async fn set_clock(State(st): State<AppState>, Json(u): Json<ClockUpdate>) -> Result<Json<ClockUpdate>, ApiError> {
    let clock = st.manual.as_ref().ok_or(ApiError::Conflict("server runs on the system clock"))?;
    clock.set(u.now_ms);
    Ok(Json(ClockUpdate { now_ms: clock.now_ms() }))
}
