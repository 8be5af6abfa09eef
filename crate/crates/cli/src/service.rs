//! HTTP facade over live sessions. Every number it returns comes from the
//! core library.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use scansim::layout::{GridLayout, LayoutSpec, BUILTIN_LAYOUTS};
use scansim::session::{LiveSession, ScheduleView, SessionConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;
use tower_http::services::ServeDir;

type Shared = Arc<Mutex<LiveSession>>;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Shared>>>,
    fixtures: Option<PathBuf>,
}

impl AppState {
    pub fn new(fixtures: Option<PathBuf>) -> Self {
        Self { sessions: Arc::default(), fixtures }
    }

    fn session(&self, id: &str) -> Result<Shared, ApiError> {
        let sessions = self.sessions.read().expect("session map poisoned");
        sessions.get(id).cloned().ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    /// Built-in layouts, overridden by same-named fixtures.
    fn layout(&self, name: &str) -> Result<GridLayout, ApiError> {
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(ApiError::BadRequest(format!("invalid layout name {name:?}")));
        }
        if let Some(dir) = &self.fixtures {
            let path = dir.join(format!("{name}.toml"));
            if path.is_file() {
                return Ok(GridLayout::from_path(path)?);
            }
        }
        GridLayout::builtin(name).ok_or_else(|| ApiError::BadRequest(format!("unknown layout {name:?}")))
    }

    fn layout_names(&self) -> Vec<String> {
        let mut names: Vec<String> = BUILTIN_LAYOUTS.iter().map(|s| s.to_string()).collect();
        if let Some(dir) = &self.fixtures {
            names.extend(fixture_names(dir));
        }
        names.sort();
        names.dedup();
        names
    }
}

fn fixture_names(dir: &Path) -> Vec<String> {
    let Ok(entries) = std::fs::read_dir(dir) else { return Vec::new() };
    entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .filter_map(|p| p.file_stem().and_then(|s| s.to_str()).map(str::to_string))
        .collect()
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("no session with id {0}")]
    UnknownSession(String),
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Core(#[from] scansim::Error),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        use scansim::Error as E;
        let status = match &self {
            ApiError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Core(E::SessionFinished) => StatusCode::CONFLICT,
            ApiError::Core(E::NoCompletedWord) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Core(E::Io(_) | E::Numeric { .. }) => StatusCode::INTERNAL_SERVER_ERROR,
            ApiError::Core(_) => StatusCode::BAD_REQUEST,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

#[derive(Serialize)]
struct LayoutEntry {
    name: String,
    #[serde(flatten)]
    spec: LayoutSpec,
}

#[derive(Serialize)]
pub struct Created {
    pub id: String,
    pub config: SessionConfig,
    pub words: Vec<String>,
    pub layout: LayoutSpec,
    pub schedule: ScheduleView,
}

#[derive(Deserialize)]
struct ClickBody {
    t_ms: f64,
}

#[derive(Deserialize)]
struct CursorQuery {
    t_ms: Option<f64>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(|| async { Json(json!({ "status": "ok" })) }))
        .route("/layouts", get(layouts))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/click", post(click))
        .route("/sessions/{id}/cursor", get(cursor))
        .route("/sessions/{id}/stats", get(stats))
        .route("/sessions/{id}/log", get(log))
        .with_state(state)
}

async fn layouts(State(state): State<AppState>) -> Result<Json<Vec<serde_json::Value>>, ApiError> {
    let mut out = Vec::new();
    for name in state.layout_names() {
        let layout = state.layout(&name)?;
        out.push(serde_json::to_value(LayoutEntry { name, spec: layout.to_spec() }).expect("layout serializes"));
    }
    Ok(Json(out))
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> Result<(StatusCode, Json<Created>), ApiError> {
    let config: SessionConfig = if body.iter().all(u8::is_ascii_whitespace) {
        SessionConfig::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(format!("invalid session config: {e}")))?
    };
    let layout = state.layout(&config.layout)?;
    let session = LiveSession::new(config, layout)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let created = Created {
        id: id.clone(),
        config: session.config().clone(),
        words: session.words().to_vec(),
        layout: session.layout().to_spec(),
        schedule: session.schedule(),
    };
    state.sessions.write().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(created)))
}

async fn click(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let session = state.session(&id)?;
    let body: ClickBody =
        serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(format!("invalid click: {e}")))?;
    let report = session.lock().expect("session poisoned").click(body.t_ms)?;
    Ok(Json(report).into_response())
}

async fn cursor(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<CursorQuery>,
) -> Result<Response, ApiError> {
    let session = state.session(&id)?;
    let mut s = session.lock().expect("session poisoned");
    Ok(match q.t_ms {
        Some(t) => Json(s.advance(t)?).into_response(),
        None => Json(json!({ "cursor": s.cursor(), "selections": s.selections() })).into_response(),
    })
}

async fn stats(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let session = state.session(&id)?;
    let stats = tokio::task::spawn_blocking(move || session.lock().expect("session poisoned").stats())
        .await
        .expect("stats task panicked")?;
    Ok(Json(stats).into_response())
}

async fn log(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let session = state.session(&id)?;
    let body = session.lock().expect("session poisoned").to_ndjson();
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}

/// Serves the API, plus static files from `static_dir` for any other path.
pub async fn serve(addr: SocketAddr, state: AppState, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let mut app = router(state);
    if let Some(dir) = static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
