//! JSON-over-HTTP API: P-set listings, position analysis and play sessions.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine as _;
use modnim_core::analysis::{analyze, closed_form_applies, Method};
use modnim_core::closed_form::build_qset_explicit;
use modnim_core::{Error as CoreError, PSet, Position, Rules};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::session::{PlaySession, SessionError, SessionState};
use crate::wire::{MoveJson, PPositionsJson, SolveJson};

pub const MAX_PSET_M: u64 = 4096;
pub const MAX_HEAPS: usize = 4;
pub const MAX_CLOSED_FORM_HEAP: u64 = 1_000_000;
pub const DEFAULT_SERVICE_BUDGET: u64 = 10_000_000;
pub const SESSION_TTL: Duration = Duration::from_secs(3600);

#[derive(Debug, Clone)]
pub struct Config {
    pub budget: u64,
    pub session_ttl: Duration,
    pub static_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: DEFAULT_SERVICE_BUDGET,
            session_ttl: SESSION_TTL,
            static_dir: None,
        }
    }
}

struct Slot {
    // tokio mutex so a busy session can be detected with try_lock
    session: tokio::sync::Mutex<PlaySession>,
    last_used: Mutex<Instant>,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    config: Config,
    sessions: Mutex<HashMap<String, Arc<Slot>>>,
    psets: Mutex<HashMap<u64, Arc<PSet>>>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        AppState {
            inner: Arc::new(Inner {
                config,
                sessions: Mutex::new(HashMap::new()),
                psets: Mutex::new(HashMap::new()),
            }),
        }
    }

    fn pset(&self, rules: &Rules) -> Arc<PSet> {
        let mut cache = self.inner.psets.lock().expect("pset cache poisoned");
        cache
            .entry(rules.m())
            .or_insert_with(|| Arc::new(build_qset_explicit(rules)))
            .clone()
    }

    fn slot(&self, id: &str) -> Option<Arc<Slot>> {
        let slot = self.inner.sessions.lock().expect("session map poisoned").get(id).cloned()?;
        *slot.last_used.lock().expect("clock poisoned") = Instant::now();
        Some(slot)
    }

    pub fn session_count(&self) -> usize {
        self.inner.sessions.lock().expect("session map poisoned").len()
    }

    /// Drops sessions idle for longer than the configured TTL as of `now`.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let ttl = self.inner.config.session_ttl;
        let mut map = self.inner.sessions.lock().expect("session map poisoned");
        let before = map.len();
        map.retain(|_, slot| {
            let last = *slot.last_used.lock().expect("clock poisoned");
            now.saturating_duration_since(last) <= ttl
        });
        before - map.len()
    }
}

/// 128 random bits, URL-safe base64.
fn new_session_id() -> String {
    URL_SAFE_NO_PAD.encode(rand::random::<[u8; 16]>())
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, msg: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: msg.into(),
                rule: None,
            },
        }
    }

    fn bad_request(msg: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, msg)
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded { .. } => ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, e.to_string()),
            other => ApiError::bad_request(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Deserialize)]
struct PPositionsQuery {
    m: Option<String>,
}

async fn ppositions(State(app): State<AppState>, Query(q): Query<PPositionsQuery>) -> ApiResult<PPositionsJson> {
    let m: u64 = q
        .m
        .as_deref()
        .and_then(|s| s.parse().ok())
        .filter(|m| (1..=MAX_PSET_M).contains(m))
        .ok_or_else(|| ApiError::bad_request(format!("m must be an integer in 1..={MAX_PSET_M}")))?;
    let rules = Rules::new(m)?;
    Ok(Json(PPositionsJson::from(app.pset(&rules).as_ref())))
}

/// Validates `m` and heaps for analysis or a new session.
fn checked_position(m: u64, heaps: &[u64]) -> Result<(Rules, Position), ApiError> {
    let rules = Rules::new(m)?;
    if heaps.is_empty() || heaps.len() > MAX_HEAPS {
        return Err(ApiError::bad_request(format!("between 1 and {MAX_HEAPS} heaps required")));
    }
    if closed_form_applies(&rules, heaps.len()) && heaps.iter().any(|&h| h > MAX_CLOSED_FORM_HEAP) {
        return Err(ApiError::bad_request(format!("heaps are limited to {MAX_CLOSED_FORM_HEAP}")));
    }
    let p = Position::new(heaps.to_vec())?;
    Ok((rules, p))
}

#[derive(Debug, Deserialize)]
struct AnalyzeBody {
    m: u64,
    heaps: Vec<u64>,
    #[serde(default)]
    oracle: bool,
}

async fn analyze_position(State(app): State<AppState>, Json(body): Json<AnalyzeBody>) -> ApiResult<SolveJson> {
    let (rules, p) = checked_position(body.m, &body.heaps)?;
    let method = if body.oracle { Method::Oracle } else { Method::Auto };
    let budget = app.inner.config.budget;
    let rec = tokio::task::spawn_blocking(move || analyze(&rules, &p, method, budget))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(SolveJson::from(&rec)))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct NewSessionBody {
    m: u64,
    heaps: Vec<u64>,
    #[serde(default = "default_true")]
    human_first: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct NewSessionResponse {
    session_id: String,
    state: SessionState,
}

async fn create_session(State(app): State<AppState>, Json(body): Json<NewSessionBody>) -> ApiResult<NewSessionResponse> {
    let (rules, start) = checked_position(body.m, &body.heaps)?;
    let id = new_session_id();
    let budget = app.inner.config.budget;
    let sid = id.clone();
    let session = tokio::task::spawn_blocking(move || PlaySession::new(sid, rules, start, body.human_first, budget))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let state = session.state();
    let slot = Arc::new(Slot {
        session: tokio::sync::Mutex::new(session),
        last_used: Mutex::new(Instant::now()),
    });
    app.inner.sessions.lock().expect("session map poisoned").insert(id.clone(), slot);
    Ok(Json(NewSessionResponse { session_id: id, state }))
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<SessionState> {
    let slot = app.slot(&id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown session"))?;
    let session = slot.session.lock().await;
    Ok(Json(session.state()))
}

#[derive(Debug, Deserialize)]
struct MoveBody {
    removals: Vec<u64>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct MoveResponse {
    engine_reply: Option<MoveJson>,
    state: SessionState,
    result: crate::session::GameResult,
}

async fn post_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<MoveBody>,
) -> ApiResult<MoveResponse> {
    let slot = app.slot(&id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown session"))?;
    let mut session = slot
        .session
        .try_lock()
        .map_err(|_| ApiError::new(StatusCode::CONFLICT, "another move for this session is in progress"))?;
    match session.human_move(body.removals) {
        Ok(reply) => Ok(Json(MoveResponse {
            engine_reply: reply.as_ref().map(MoveJson::from),
            state: session.state(),
            result: session.result(),
        })),
        Err(SessionError::Illegal(rule)) => Err(ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: ErrorBody {
                error: rule.to_string(),
                rule: Some(rule.rule().to_string()),
            },
        }),
        Err(SessionError::Finished) => Err(ApiError::new(StatusCode::CONFLICT, "the game is already over")),
    }
}

pub fn router(app: AppState) -> Router {
    let static_dir = app.inner.config.static_dir.clone();
    let api = Router::new()
        .route("/api/v1/ppositions", get(ppositions))
        .route("/api/v1/analyze", post(analyze_position))
        .route("/api/v1/session", post(create_session))
        .route("/api/v1/session/{id}", get(get_session))
        .route("/api/v1/session/{id}/move", post(post_move))
        .with_state(app)
        .layer(CorsLayer::permissive());
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds `addr` and serves until ctrl-c. Runs idle-session eviction once a
/// minute.
pub async fn serve(listener: tokio::net::TcpListener, config: Config) -> std::io::Result<()> {
    let app = AppState::new(config);
    let sweeper = app.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_idle(Instant::now());
        }
    });
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
