//! JSON API for browsing instances, live prediction, submitting
//! perturbations, admin validation and dataset download.
//!
//! The store sits behind a synchronous mutex that is never held across an
//! await or a prediction call; predictions run on the blocking pool.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use evograd::predict::{
    load_records, PredictError, Prediction, PredictionRequest, Predictor, RemoteConfig, RemotePredictor, StubPredictor,
};
use evograd::store::{DatasetName, DatasetStore, Proposal, SplitName, StoreError, SubmissionStatus};
use evograd::text::{Choice, InstanceId, Violation, WscInstance};

pub const DEFAULT_LIMIT: usize = 100;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub data_dir: PathBuf,
    pub model_endpoint: Option<String>,
    /// Prediction-record CSV served as the "replay" model.
    pub replay_records: Option<PathBuf>,
    /// Without a token every status change is refused.
    pub admin_token: Option<String>,
}

pub struct AppState {
    store: Mutex<DatasetStore>,
    predictors: BTreeMap<String, Arc<dyn Predictor>>,
    admin_token: Option<String>,
}

impl AppState {
    pub fn new(store: DatasetStore, predictors: Vec<Arc<dyn Predictor>>, admin_token: Option<String>) -> Self {
        let mut map: BTreeMap<String, Arc<dyn Predictor>> = BTreeMap::new();
        map.insert(StubPredictor::NAME.to_string(), Arc::new(StubPredictor));
        for p in predictors {
            map.insert(p.name().to_string(), p);
        }
        Self { store: Mutex::new(store), predictors: map, admin_token }
    }

    /// Opens the data directory and enables stub, plus replay and remote
    /// when configured.
    pub fn from_config(cfg: &ServiceConfig) -> Result<Self, ServeError> {
        let store = DatasetStore::open(&cfg.data_dir)?;
        let mut predictors: Vec<Arc<dyn Predictor>> = Vec::new();
        if let Some(path) = &cfg.replay_records {
            predictors.push(Arc::new(load_records(path)?));
        }
        if let Some(endpoint) = &cfg.model_endpoint {
            predictors.push(Arc::new(RemotePredictor::new("remote", RemoteConfig::new(endpoint.clone()))?));
        }
        Ok(Self::new(store, predictors, cfg.admin_token.clone()))
    }

    /// Stub first, then the rest by name.
    pub fn model_names(&self) -> Vec<String> {
        let mut names = vec![StubPredictor::NAME.to_string()];
        names.extend(self.predictors.keys().filter(|k| *k != StubPredictor::NAME).cloned());
        names
    }

    fn store(&self) -> MutexGuard<'_, DatasetStore> {
        self.store.lock().unwrap_or_else(|p| p.into_inner())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/sentences", get(list_sentences))
        .route("/api/predict", post(predict))
        .route("/api/submissions", post(submit).get(list_submissions))
        .route("/api/submissions/:id/status", post(set_status))
        .route("/api/dataset.csv", get(dataset_csv))
        .route("/api/models", get(models))
        .with_state(state)
}

/// Binds, reports the bound address through `on_bound`, and serves until
/// ctrl-c. Build `state` outside the runtime and keep a handle to it: the
/// remote client must not be created or dropped on a runtime thread.
pub async fn serve(state: Arc<AppState>, bind: SocketAddr, on_bound: impl FnOnce(SocketAddr)) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

struct ApiError {
    status: StatusCode,
    body: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, message: impl Into<String>) -> Self {
        Self { status, body: json!({ "error": error, "message": message.into() }) }
    }

    fn violations(violations: &[Violation]) -> Self {
        let message = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        Self {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": "InvalidSubmission", "message": message, "violations": violations }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let msg = e.to_string();
        match e {
            StoreError::InvalidSubmission(v) => ApiError::violations(&v),
            StoreError::UnknownParent(_) => ApiError::new(StatusCode::NOT_FOUND, "UnknownParent", msg),
            StoreError::UnknownSubmission(_) => ApiError::new(StatusCode::NOT_FOUND, "UnknownSubmission", msg),
            StoreError::IllegalTransition { .. } => ApiError::new(StatusCode::CONFLICT, "IllegalTransition", msg),
            StoreError::UnknownSplit(_) => ApiError::new(StatusCode::BAD_REQUEST, "UnknownSplit", msg),
            StoreError::Perturb(_) => ApiError::new(StatusCode::BAD_REQUEST, "InvalidPerturbation", msg),
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", msg),
        }
    }
}

impl From<PredictError> for ApiError {
    fn from(e: PredictError) -> Self {
        let msg = e.to_string();
        match e {
            PredictError::InvalidRequest(v) => Self {
                status: StatusCode::BAD_REQUEST,
                body: json!({ "error": "InvalidRequest", "message": msg, "violations": v }),
            },
            PredictError::RemoteUnavailable { .. } => ApiError::new(StatusCode::BAD_GATEWAY, "RemoteUnavailable", msg),
            PredictError::MalformedResponse(_) => ApiError::new(StatusCode::BAD_GATEWAY, "MalformedResponse", msg),
            PredictError::ReplayMiss(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ReplayMiss", msg),
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", msg),
        }
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "MalformedBody", e.to_string()))
}

#[derive(Serialize)]
struct SentenceView {
    id: InstanceId,
    sentence: String,
    option1: String,
    option2: String,
    answer: Choice,
    depth: u32,
    parent_id: Option<InstanceId>,
}

impl From<WscInstance> for SentenceView {
    fn from(i: WscInstance) -> Self {
        Self {
            id: i.id,
            sentence: i.sentence(),
            option1: i.option1,
            option2: i.option2,
            answer: i.answer,
            depth: i.depth,
            parent_id: i.parent_id,
        }
    }
}

fn usize_param(q: &HashMap<String, String>, name: &str, default: usize) -> Result<usize, ApiError> {
    match q.get(name) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "InvalidParameter", format!("{name}={v:?} is not a non-negative integer"))),
    }
}

async fn list_sentences(State(state): State<Arc<AppState>>, Query(q): Query<HashMap<String, String>>) -> Result<Json<Vec<SentenceView>>, ApiError> {
    let dataset = q.get("dataset").map(|d| d.parse::<DatasetName>()).transpose()?;
    let split = q.get("split").map(|s| s.parse::<SplitName>()).transpose()?;
    let offset = usize_param(&q, "offset", 0)?;
    let limit = usize_param(&q, "limit", DEFAULT_LIMIT)?;
    let rows = state.store().select(dataset, split);
    Ok(Json(rows.into_iter().skip(offset).take(limit).map(SentenceView::from).collect()))
}

#[derive(Deserialize)]
struct PredictBody {
    #[serde(default)]
    model: Option<String>,
    sentence: String,
    option1: String,
    option2: String,
}

fn predictor(state: &AppState, model: Option<&str>) -> Result<Arc<dyn Predictor>, ApiError> {
    let name = model.unwrap_or(StubPredictor::NAME);
    state
        .predictors
        .get(name)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownModel", format!("model {name:?} is not enabled")))
}

async fn run_prediction(p: Arc<dyn Predictor>, req: PredictionRequest) -> Result<Prediction, ApiError> {
    tokio::task::spawn_blocking(move || p.predict(&req))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
        .map_err(ApiError::from)
}

async fn predict(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<Prediction>, ApiError> {
    let body: PredictBody = parse_body(&body)?;
    let req = PredictionRequest::new(body.sentence, body.option1, body.option2);
    req.validate()?;
    let p = predictor(&state, body.model.as_deref())?;
    Ok(Json(run_prediction(p, req).await?))
}

#[derive(Deserialize)]
struct SubmitBody {
    parent_id: InstanceId,
    sentence: String,
    option1: String,
    option2: String,
    answer: Choice,
    #[serde(default)]
    model: Option<String>,
    #[serde(default)]
    submitter: Option<String>,
}

#[derive(Serialize)]
struct SubmitReply {
    submission_id: u64,
    prediction: Prediction,
    depth: u32,
    status: SubmissionStatus,
}

async fn submit(State(state): State<Arc<AppState>>, body: Bytes) -> Result<(StatusCode, Json<SubmitReply>), ApiError> {
    let body: SubmitBody = parse_body(&body)?;
    let p = predictor(&state, body.model.as_deref())?;
    let proposal = Proposal {
        parent_id: body.parent_id,
        sentence: body.sentence,
        option1: body.option1,
        option2: body.option2,
        answer: body.answer,
        submitter: body.submitter.unwrap_or_default(),
        model: p.name().to_string(),
    };
    // Validate before spending a prediction; the store checks again.
    state.store().preview(&proposal)?;
    let req = PredictionRequest::new(proposal.sentence.clone(), proposal.option1.clone(), proposal.option2.clone());
    let prediction = run_prediction(p, req).await?;
    let sub = state.store().submit(proposal, prediction)?;
    let reply = SubmitReply { submission_id: sub.id, prediction: sub.prediction, depth: sub.depth, status: sub.status };
    Ok((StatusCode::CREATED, Json(reply)))
}

async fn list_submissions(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    Json(state.store().journal().submissions())
}

#[derive(Deserialize)]
struct StatusBody {
    status: SubmissionStatus,
}

fn authorized(state: &AppState, headers: &HeaderMap) -> bool {
    let Some(expected) = state.admin_token.as_deref() else { return false };
    headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .is_some_and(|t| t.trim() == expected)
}

async fn set_status(
    State(state): State<Arc<AppState>>,
    Path(id): Path<u64>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    if !authorized(&state, &headers) {
        return Err(ApiError::new(StatusCode::UNAUTHORIZED, "Unauthorized", "missing or wrong admin token"));
    }
    let body: StatusBody = parse_body(&body)?;
    let updated = state.store().set_status(id, body.status)?;
    Ok(Json(updated).into_response())
}

async fn dataset_csv(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    let bytes = state.store().export_csv_bytes();
    ([(header::CONTENT_TYPE, "text/csv; charset=utf-8"), (header::CONTENT_DISPOSITION, "attachment; filename=\"dataset.csv\"")], bytes)
}

async fn models(State(state): State<Arc<AppState>>) -> Json<Vec<String>> {
    Json(state.model_names())
}
