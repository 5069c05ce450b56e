//! Read-only HTTP API: `/query`, `/doc/{id}`, `/network` and `/healthz`.
//!
//! Every handler works against one immutable [`Engine`] snapshot, so the
//! router can serve concurrent requests without locking.

use axum::extract::{Path, Query, Request, State};
use axum::http::{StatusCode, Uri};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::{NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use serde_json::json;
use soograph_core::corpus::parse_date;
use soograph_core::engine::{NetworkKind, QueryError};
use soograph_core::netviz::{export, Format};
use soograph_core::query::{EvalError, ParseErrorKind};
use soograph_core::report::{entry_views, DocReport, EntryView};
use soograph_core::Engine;
use std::future::Future;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

pub const DEFAULT_ROWS: usize = 25;
pub const MAX_ROWS: usize = 500;

pub struct AppState {
    pub engine: Engine,
    /// Reference date when a request carries no `now`; today (UTC) if unset.
    pub now: Option<NaiveDate>,
}

impl AppState {
    pub fn new(engine: Engine, now: Option<NaiveDate>) -> Self {
        AppState { engine, now }
    }

    fn now(&self, param: Option<&str>) -> Result<NaiveDate, ApiError> {
        match param {
            Some(s) => parse_date(s).ok_or_else(|| ApiError::bad_param("now", format!("bad date {s:?}"))),
            None => Ok(self.now.unwrap_or_else(|| Utc::now().date_naive())),
        }
    }
}

/// An error response: `{"error": kind, "message": text, "offset"?: n}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
    offset: Option<usize>,
}

impl ApiError {
    fn bad_param(name: &str, message: String) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            kind: "bad_parameter",
            message: format!("{name}: {message}"),
            offset: None,
        }
    }

    fn not_found(message: String) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            kind: "not_found",
            message,
            offset: None,
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Parse(p) => ApiError {
                status: match p.kind {
                    ParseErrorKind::UnsupportedField(_) => StatusCode::UNPROCESSABLE_ENTITY,
                    _ => StatusCode::BAD_REQUEST,
                },
                kind: "parse_error",
                message: p.kind.to_string(),
                offset: Some(p.offset),
            },
            QueryError::Eval(e) => {
                let (status, kind) = match &e {
                    EvalError::LibraryNotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
                    EvalError::InvalidArgument(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_argument"),
                    _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
                };
                ApiError {
                    status,
                    kind,
                    message: e.to_string(),
                    offset: None,
                }
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({"error": self.kind, "message": self.message});
        if let Some(o) = self.offset {
            body["offset"] = json!(o);
        }
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct QueryParams {
    pub q: Option<String>,
    pub rows: Option<usize>,
    pub start: Option<usize>,
    pub now: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct QueryResponse {
    pub query: String,
    pub n_total: usize,
    pub entries: Vec<EntryView>,
    pub elapsed_ms: u64,
}

fn required_q(q: Option<String>) -> Result<String, ApiError> {
    match q {
        Some(q) => Ok(q),
        None => Err(ApiError::bad_param("q", "missing".into())),
    }
}

async fn query(State(st): State<Arc<AppState>>, Query(p): Query<QueryParams>) -> Result<Json<QueryResponse>, ApiError> {
    let t0 = Instant::now();
    let now = st.now(p.now.as_deref())?;
    let q = required_q(p.q)?;
    let rows = p.rows.unwrap_or(DEFAULT_ROWS).min(MAX_ROWS);
    let start = p.start.unwrap_or(0);
    let out = st.engine.query(&q, now)?;
    let mut entries = entry_views(&out.list, st.engine.store(), start.saturating_add(rows));
    entries.drain(..start.min(entries.len()));
    Ok(Json(QueryResponse {
        query: out.canonical,
        n_total: out.list.len(),
        entries,
        elapsed_ms: t0.elapsed().as_millis() as u64,
    }))
}

#[derive(Debug, Deserialize)]
pub struct DocParams {
    pub now: Option<String>,
}

fn query_link(q: &str) -> String {
    let enc: String = form_urlencoded::byte_serialize(q.as_bytes()).collect();
    format!("/query?q={enc}")
}

async fn doc(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(p): Query<DocParams>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let now = st.now(p.now.as_deref())?;
    let r = DocReport::build(&st.engine, &id, now)
        .ok_or_else(|| ApiError::not_found(format!("document not found: {id}")))?;
    let links = json!({
        "references": query_link(&r.queries.references),
        "citations": query_link(&r.queries.citations),
        "trending": query_link(&r.queries.trending),
        "similar": query_link(&r.queries.similar),
    });
    let mut body = serde_json::to_value(&r).expect("report serializes");
    body["links"] = links;
    Ok(Json(body))
}

#[derive(Debug, Deserialize)]
pub struct NetworkParams {
    pub q: Option<String>,
    pub max_nodes: Option<usize>,
    pub seed: Option<u64>,
    pub kind: Option<String>,
    pub now: Option<String>,
}

async fn network(State(st): State<Arc<AppState>>, Query(p): Query<NetworkParams>) -> Result<Response, ApiError> {
    let now = st.now(p.now.as_deref())?;
    let kind: NetworkKind = match p.kind.as_deref() {
        None => NetworkKind::Paper,
        Some(k) => k.parse().map_err(|m| ApiError::bad_param("kind", m))?,
    };
    let q = required_q(p.q)?;
    let out = st.engine.query(&q, now)?;
    let net = st.engine.network(&out.list, kind, p.max_nodes, p.seed.unwrap_or(0));
    Ok(([("content-type", "application/json")], export(&net, Format::Json)).into_response())
}

async fn healthz(State(st): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({"status": "ok", "n_docs": st.engine.store().len()}))
}

async fn log_request(uri: Uri, req: Request, next: Next) -> Response {
    let t0 = Instant::now();
    let method = req.method().clone();
    let resp = next.run(req).await;
    log::info!(
        "{method} {uri} {} {}ms",
        resp.status().as_u16(),
        t0.elapsed().as_millis()
    );
    resp
}

/// The API router; files under `static_dir`, if given, are served for
/// every other path.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let mut app = Router::new()
        .route("/query", get(query))
        .route("/doc/{id}", get(doc))
        .route("/network", get(network))
        .route("/healthz", get(healthz))
        .with_state(state);
    if let Some(dir) = static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app.layer(CorsLayer::permissive())
        .layer(middleware::from_fn(log_request))
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}

/// Resolves on SIGTERM or Ctrl-C.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}
