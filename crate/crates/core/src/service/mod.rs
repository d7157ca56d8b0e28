//! HTTP+JSON service: search, record lookup, assessment plans, feedback
//! capture and export. The index is served read-only; feedback goes through
//! a single serialized appender.
//!
//! | Route | |
//! |---|---|
//! | `GET /api/search?q=&method=&sort=relevance\|time&limit=&expansion=on\|off` | ranked results |
//! | `GET /api/records/{id}` | one record |
//! | `GET /api/plan/{assessor_id}` | assigned queries with frozen result pools |
//! | `POST /api/feedback` | store one vote (201) |
//! | `GET /api/export/qrels` | fused grades, `query_id 0 record_id grade` |
//! | `GET /api/export/feedback` | effective votes as JSON lines |
//! | `GET /healthz` | liveness |
//!
//! Errors are `{"code": ..., "message": ...}` bodies.

mod feedback;
mod plan;

use std::future::Future;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query as UrlQuery, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub use feedback::FeedbackStore;
pub use plan::{AssessmentPlan, PLAN_DEPTH};

use crate::config::{parse_switch, ConfigError, Settings};
use crate::eval::{format_feedback_log, EvalError, FeedbackEvent, Level};
use crate::index::{load_index, IndexError};
use crate::search::{order_by_time, Method, SearchConfig, SearchError, Searcher};
use crate::Record;

/// Plan id accepted for votes outside any assessment plan.
pub const AD_HOC_PLAN: &str = "ad-hoc";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid feedback log {0}")]
    Feedback(String),
    #[error("invalid assessment plan {0}")]
    Plan(String),
    #[error("invalid service configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub index_dir: PathBuf,
    pub host: String,
    pub port: u16,
    pub feedback_log: PathBuf,
    pub plan: Option<PathBuf>,
    pub static_dir: Option<PathBuf>,
    pub search: SearchConfig,
}

impl ServiceConfig {
    pub fn new(index_dir: impl Into<PathBuf>) -> Self {
        Self {
            index_dir: index_dir.into(),
            host: "127.0.0.1".into(),
            port: 8080,
            feedback_log: PathBuf::from("feedback.jsonl"),
            plan: None,
            static_dir: None,
            search: SearchConfig::default(),
        }
    }

    /// Reads `index_dir`, `host`, `port`, `feedback_log`, `plan`,
    /// `static_dir`, `method`, `page_size`, `k` and `expansion`.
    pub fn from_settings(settings: &Settings) -> Result<Self, ServiceError> {
        let index_dir = settings
            .path("index_dir")
            .ok_or_else(|| ServiceError::InvalidConfig("index_dir is not set".into()))?;
        let mut c = Self::new(index_dir);
        if let Some(host) = settings.get("host") {
            c.host = host.to_string();
        }
        if let Some(port) = settings.parsed::<u16>("port")? {
            c.port = port;
        }
        if let Some(p) = settings.path("feedback_log") {
            c.feedback_log = p;
        }
        c.plan = settings.path("plan");
        c.static_dir = settings.path("static_dir");
        if let Some(m) = settings.parsed::<Method>("method")? {
            c.search.method = m;
        }
        if let Some(k) = settings.parsed::<usize>("k")? {
            c.search.k = k;
        }
        if let Some(n) = settings.parsed::<usize>("page_size")? {
            c.search.page_size = n;
        }
        if let Some(e) = settings.flag("expansion")? {
            c.search.query_expansion = e;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.port == 0 {
            return Err(ServiceError::InvalidConfig("port must lie in 1-65535".into()));
        }
        self.search.validate()?;
        Ok(())
    }
}

/// Shared, read-mostly service state.
#[derive(Debug, Clone)]
pub struct AppState {
    inner: Arc<StateInner>,
}

#[derive(Debug)]
struct StateInner {
    searcher: Searcher,
    search: SearchConfig,
    plan: Option<AssessmentPlan>,
    feedback: FeedbackStore,
}

impl AppState {
    pub fn new(
        searcher: Searcher,
        search: SearchConfig,
        plan: Option<AssessmentPlan>,
        feedback: FeedbackStore,
    ) -> Self {
        Self {
            inner: Arc::new(StateInner {
                searcher,
                search,
                plan,
                feedback,
            }),
        }
    }

    /// Loads the index (failing on a provider fingerprint mismatch), the
    /// plan if configured, and replays the feedback log.
    pub fn open(config: &ServiceConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let index = load_index(&config.index_dir)?;
        let searcher = Searcher::from_index(Arc::new(index))?;
        let plan = config.plan.as_deref().map(AssessmentPlan::load).transpose()?;
        let feedback = FeedbackStore::open(&config.feedback_log)?;
        tracing::info!(
            documents = searcher.index().doc_count(),
            replayed = feedback.events().len(),
            "service state ready"
        );
        Ok(Self::new(searcher, config.search, plan, feedback))
    }

    pub fn searcher(&self) -> &Searcher {
        &self.inner.searcher
    }

    pub fn feedback(&self) -> &FeedbackStore {
        &self.inner.feedback
    }

    pub fn plan(&self) -> Option<&AssessmentPlan> {
        self.inner.plan.as_ref()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApiErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ApiErrorBody {
            code: self.code.to_string(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::EmptyQuery => Self::new(StatusCode::BAD_REQUEST, "empty_query", "empty query"),
            SearchError::InvalidConfig(m) => Self::bad_request(m),
            other => {
                tracing::error!(error = %other, "search failed");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "search failed")
            }
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        tracing::error!(error = %e, "request failed");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "internal error")
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct SearchParams {
    pub q: Option<String>,
    pub method: Option<String>,
    pub sort: Option<String>,
    pub limit: Option<String>,
    pub expansion: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOrder {
    Relevance,
    Time,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApiResult {
    pub rank: usize,
    pub record_id: String,
    pub timestamp: i64,
    pub score: f64,
    pub doc_sim: f64,
    pub term_sim: f64,
    pub title: String,
    pub text: String,
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResponse {
    pub query: String,
    pub method: Method,
    pub sort: SortOrder,
    pub expansion: bool,
    /// Documents retrieved before paging.
    pub matched: usize,
    pub results: Vec<ApiResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApiRecord {
    #[serde(flatten)]
    pub record: Record,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanQuery {
    pub query_id: String,
    pub text: String,
    pub records: Vec<ApiRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanResponse {
    pub plan_id: String,
    pub assessor_id: String,
    pub queries: Vec<PlanQuery>,
    /// The assessor's current votes, so a client can restore its state.
    pub judgments: Vec<FeedbackEvent>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeedbackRequest {
    pub assessor_id: String,
    pub query_id: String,
    pub record_id: String,
    pub level: Level,
    pub relevant: bool,
    #[serde(default)]
    pub plan_id: Option<String>,
}

fn api_record(record: &Record) -> ApiRecord {
    ApiRecord {
        text: record.text(),
        record: record.clone(),
    }
}

async fn healthz(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(serde_json::json!({
        "status": "ok",
        "documents": state.searcher().index().doc_count(),
    }))
}

async fn search(
    State(state): State<AppState>,
    params: Result<UrlQuery<SearchParams>, QueryRejection>,
) -> Result<Json<SearchResponse>, ApiError> {
    let UrlQuery(p) = params.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let defaults = state.inner.search;
    let method = match p.method.as_deref().filter(|m| !m.is_empty()) {
        Some(m) => m.parse::<Method>()?,
        None => defaults.method,
    };
    let sort = match p.sort.as_deref().unwrap_or("relevance") {
        "relevance" | "" => SortOrder::Relevance,
        "time" | "timestamp" => SortOrder::Time,
        other => return Err(ApiError::bad_request(format!("unknown sort {other:?} (expected relevance or time)"))),
    };
    let limit = match p.limit.as_deref().filter(|l| !l.is_empty()) {
        Some(l) => l
            .parse::<usize>()
            .ok()
            .filter(|&n| (1..=defaults.k).contains(&n))
            .ok_or_else(|| ApiError::bad_request(format!("limit must lie in 1..={}", defaults.k)))?,
        None => defaults.page_size,
    };
    let expansion = match p.expansion.as_deref().filter(|e| !e.is_empty()) {
        Some(e) => parse_switch(e).ok_or_else(|| ApiError::bad_request("expansion must be on or off"))?,
        None => defaults.query_expansion,
    };
    let query = p.q.unwrap_or_default();
    let page_size = match sort {
        SortOrder::Relevance => limit,
        SortOrder::Time => defaults.k,
    };
    let config = SearchConfig {
        k: defaults.k,
        page_size,
        query_expansion: expansion,
        method,
    };
    let outcome = state.searcher().search(&query, &config)?;
    let mut results = outcome.results;
    if sort == SortOrder::Time {
        order_by_time(&mut results);
        results.truncate(limit);
    }
    let index = state.searcher().index();
    let results = results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let record = index.record(r.ordinal);
            ApiResult {
                rank: i + 1,
                record_id: r.record_id,
                timestamp: r.timestamp,
                score: r.score,
                doc_sim: r.doc_sim,
                term_sim: r.term_sim,
                title: record.title.clone(),
                text: record.text(),
                attributes: record.attributes.clone(),
            }
        })
        .collect();
    Ok(Json(SearchResponse {
        query,
        method,
        sort,
        expansion,
        matched: outcome.matched,
        results,
    }))
}

async fn record(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<ApiRecord>, ApiError> {
    state
        .searcher()
        .index()
        .record_by_id(&id)
        .map(|r| Json(api_record(r)))
        .ok_or_else(|| ApiError::not_found("unknown_record", format!("unknown record {id:?}")))
}

async fn plan_for(
    State(state): State<AppState>,
    UrlPath(assessor): UrlPath<String>,
) -> Result<Json<PlanResponse>, ApiError> {
    let plan = state
        .plan()
        .ok_or_else(|| ApiError::not_found("no_plan", "no assessment plan is active"))?;
    let assigned = plan
        .assignments
        .get(&assessor)
        .ok_or_else(|| ApiError::not_found("unknown_assessor", format!("unknown assessor {assessor:?}")))?;
    let index = state.searcher().index();
    let queries = assigned
        .iter()
        .map(|qid| PlanQuery {
            query_id: qid.clone(),
            text: plan.queries.get(qid).cloned().unwrap_or_default(),
            records: plan
                .pool(qid)
                .iter()
                .filter_map(|id| index.record_by_id(id))
                .map(api_record)
                .collect(),
        })
        .collect();
    let judgments = state
        .feedback()
        .effective()
        .into_iter()
        .filter(|e| e.assessor_id == assessor)
        .collect();
    Ok(Json(PlanResponse {
        plan_id: plan.plan_id.clone(),
        assessor_id: assessor,
        queries,
        judgments,
    }))
}

async fn post_feedback(
    State(state): State<AppState>,
    body: Result<Json<FeedbackRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<FeedbackEvent>), ApiError> {
    let Json(req) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    if req.assessor_id.trim().is_empty() || req.query_id.trim().is_empty() {
        return Err(ApiError::bad_request("assessor_id and query_id must not be empty"));
    }
    if state.searcher().index().record_by_id(&req.record_id).is_none() {
        return Err(ApiError::not_found(
            "unknown_record",
            format!("unknown record {:?}", req.record_id),
        ));
    }
    let plan_id = match (state.plan(), req.plan_id.as_deref()) {
        (_, Some(AD_HOC_PLAN)) | (None, None) => AD_HOC_PLAN.to_string(),
        (None, Some(other)) => {
            return Err(ApiError::not_found("unknown_plan", format!("unknown plan {other:?}")));
        }
        (Some(plan), requested) => {
            if requested.is_some_and(|p| p != plan.plan_id) {
                return Err(ApiError::not_found(
                    "unknown_plan",
                    format!("unknown plan {:?}", requested.unwrap_or_default()),
                ));
            }
            if !plan.contains_query(&req.query_id) {
                return Err(ApiError::not_found(
                    "unknown_query",
                    format!("query {:?} is not part of plan {:?}", req.query_id, plan.plan_id),
                ));
            }
            plan.plan_id.clone()
        }
    };
    let event = FeedbackEvent {
        assessor_id: req.assessor_id,
        query_id: req.query_id,
        record_id: req.record_id,
        level: req.level,
        relevant: req.relevant,
        timestamp: 0,
        plan_id: Some(plan_id),
    };
    let feedback = state.inner.clone();
    let stored = tokio::task::spawn_blocking(move || feedback.feedback.append(event))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok((StatusCode::CREATED, Json(stored)))
}

async fn export_qrels(State(state): State<AppState>) -> impl IntoResponse {
    (
        [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
        state.feedback().qrels().format(),
    )
}

async fn export_feedback(State(state): State<AppState>) -> impl IntoResponse {
    (
        [(header::CONTENT_TYPE, "application/x-ndjson")],
        format_feedback_log(&state.feedback().effective()),
    )
}

async fn not_found() -> ApiError {
    ApiError::not_found("not_found", "no such route")
}

/// All API routes; static files from `static_dir` are served for every
/// other path when given.
pub fn router(state: AppState, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/healthz", get(healthz))
        .route("/api/search", get(search))
        .route("/api/records/{id}", get(record))
        .route("/api/plan/{assessor_id}", get(plan_for))
        .route("/api/feedback", post(post_feedback))
        .route("/api/export/qrels", get(export_qrels))
        .route("/api/export/feedback", get(export_feedback));
    let api = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    };
    api.with_state(state)
}

/// Serves on an already bound listener until `shutdown` resolves, then
/// syncs the feedback log.
pub async fn serve_on<F>(
    listener: tokio::net::TcpListener,
    state: AppState,
    static_dir: Option<&Path>,
    shutdown: F,
) -> Result<(), ServiceError>
where
    F: Future<Output = ()> + Send + 'static,
{
    let addr = listener.local_addr().map_err(|source| ServiceError::Bind {
        addr: "listener".into(),
        source,
    })?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state.clone(), static_dir))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(|source| ServiceError::Io {
            path: PathBuf::from(addr.to_string()),
            source,
        })?;
    state.feedback().sync()?;
    tracing::info!("feedback log synced, shut down");
    Ok(())
}

/// Loads state, binds `host:port` and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let state = AppState::open(&config)?;
    let addr = format!("{}:{}", config.host, config.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServiceError::Bind { addr: addr.clone(), source })?;
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    serve_on(listener, state, config.static_dir.as_deref(), shutdown).await
}

/// A server running in the background on an ephemeral local port.
#[derive(Debug)]
pub struct LocalServer {
    pub addr: SocketAddr,
    shutdown: tokio::sync::oneshot::Sender<()>,
    handle: tokio::task::JoinHandle<Result<(), ServiceError>>,
}

impl LocalServer {
    /// Binds `127.0.0.1:0` and starts serving `state`.
    pub async fn start(state: AppState) -> Result<Self, ServiceError> {
        let bind_err = |source| ServiceError::Bind {
            addr: "127.0.0.1:0".into(),
            source,
        };
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.map_err(bind_err)?;
        let addr = listener.local_addr().map_err(bind_err)?;
        let (shutdown, rx) = tokio::sync::oneshot::channel::<()>();
        let handle = tokio::spawn(serve_on(listener, state, None, async {
            let _ = rx.await;
        }));
        Ok(Self {
            addr,
            shutdown,
            handle,
        })
    }

    /// Graceful shutdown; waits for in-flight requests.
    pub async fn stop(self) -> Result<(), ServiceError> {
        let _ = self.shutdown.send(());
        self.handle
            .await
            .map_err(|e| ServiceError::InvalidConfig(format!("server task failed: {e}")))?
    }
}
