//! HTTP API: job submission, report cards, feedback, the review queue and
//! LEP queries. Mutating endpoints require the static bearer token when one
//! is configured.

use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::feedback::{
    feedback_tally, ingest_feedback, next_review_item, register_product_file, resolve_review_item,
    FeedbackEvent, ReviewState,
};
use super::store::Store;
use super::ServiceError;
use crate::geo::{CwaStats, PriorityLanguage};
use crate::metrics::{ExternalScorer, MetricConfig};
use crate::pipeline::{
    back_translate, report_card, score_job, translate_product, PipelineConfig, PipelineError,
    Product, ProductTypeRegistry, ReportFilter, SegmentScoreRecord, TranslationEngine,
    TranslationJob,
};
use crate::tm::{LangPair, TranslationMemory};

const NS_JOB: &str = "job";
const NS_SCORE: &str = "score";
const NS_JOB_REPORT: &str = "jobreport";
const NS_TRANSLATED: &str = "translated";

/// Pre-computed census data served by the LEP endpoints.
#[derive(Debug, Clone, Default)]
pub struct GeoData {
    pub priority: Vec<PriorityLanguage>,
    pub stats: Vec<CwaStats>,
}

pub struct AppState {
    pub store: Arc<Store>,
    pub tm: Arc<TranslationMemory>,
    pub termbase: Vec<crate::tm::TermEntry>,
    pub engine: Arc<dyn TranslationEngine>,
    pub reverse_engine: Option<Arc<dyn TranslationEngine>>,
    pub scorer: Option<Arc<ExternalScorer>>,
    pub metric_config: MetricConfig,
    pub pipeline_config: PipelineConfig,
    pub registry: ProductTypeRegistry,
    pub geo: Option<GeoData>,
    pub auth_token: Option<String>,
}

impl AppState {
    /// State with identity forward/reverse engines and no scorer; the
    /// smallest useful configuration.
    pub fn minimal(store: Arc<Store>) -> Self {
        Self {
            store,
            tm: Arc::new(TranslationMemory::new()),
            termbase: Vec::new(),
            engine: Arc::new(crate::pipeline::IdentityEngine::new("identity-fwd")),
            reverse_engine: Some(Arc::new(crate::pipeline::IdentityEngine::new("identity-rev"))),
            scorer: None,
            metric_config: MetricConfig::default(),
            pipeline_config: PipelineConfig::default(),
            registry: ProductTypeRegistry::default(),
            geo: None,
            auth_token: None,
        }
    }
}

fn now_epoch() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0)
}

struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(err: ServiceError) -> Self {
        let status = match &err {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::InvalidArgument(_) | ServiceError::NonRepresentable { .. } => {
                StatusCode::BAD_REQUEST
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, err.to_string())
    }
}

impl From<PipelineError> for ApiError {
    fn from(err: PipelineError) -> Self {
        let status = match &err {
            PipelineError::EngineFailure { .. } => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, err.to_string())
    }
}

fn authorize(state: &AppState, headers: &HeaderMap) -> Result<(), ApiError> {
    let Some(expected) = &state.auth_token else {
        return Ok(());
    };
    let presented = headers
        .get("authorization")
        .and_then(|v| v.to_str().ok())
        .unwrap_or_default();
    if presented == format!("Bearer {expected}") {
        Ok(())
    } else {
        Err(ApiError::new(StatusCode::UNAUTHORIZED, "invalid or missing token"))
    }
}

#[derive(Debug, Deserialize)]
struct JobRequest {
    product_type: String,
    office: String,
    #[serde(default = "default_language")]
    language: String,
    #[serde(default)]
    issued_at: Option<i64>,
    body: String,
    target_language: String,
    #[serde(default)]
    file_name: Option<String>,
    /// run back-translation scoring when a reverse engine is configured
    #[serde(default = "default_true")]
    score: bool,
}

fn default_language() -> String {
    "en".to_string()
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Serialize)]
struct JobAccepted {
    job_id: String,
    file_name: String,
    scored: bool,
    warnings: Vec<String>,
}

async fn submit_job(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Json(request): Json<JobRequest>,
) -> Result<Response, ApiError> {
    authorize(&state, &headers)?;
    let result = tokio::task::spawn_blocking(move || process_job(&state, request))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok((StatusCode::ACCEPTED, Json(result)).into_response())
}

fn process_job(state: &AppState, request: JobRequest) -> Result<JobAccepted, ApiError> {
    let issued_at = request.issued_at.unwrap_or_else(now_epoch);
    let product = Product::new(
        &request.product_type,
        &request.office,
        &request.language,
        issued_at,
        &request.body,
        &state.registry,
    )?;
    let lang_pair = LangPair::new(request.language.clone(), request.target_language.clone())
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let outcome = translate_product(
        &product,
        &lang_pair,
        state.engine.as_ref(),
        &state.tm,
        &state.termbase,
        &state.pipeline_config,
    )?;
    let file_name = request.file_name.unwrap_or_else(|| {
        format!(
            "{}-{}-{}-{}.txt",
            request.office, request.product_type, issued_at, request.target_language
        )
    });
    let job_id = outcome.job.job_id.clone();
    state.store.put(NS_JOB, &job_id, &outcome.job)?;
    state
        .store
        .put(NS_TRANSLATED, &file_name, &outcome.translated)?;
    register_product_file(&state.store, &file_name, &job_id)?;

    let mut scored = false;
    if request.score {
        if let Some(reverse) = &state.reverse_engine {
            let pairs = back_translate(&outcome.job, reverse.as_ref())?;
            let job_score = score_job(
                &outcome.job,
                &pairs,
                &state.metric_config,
                state.scorer.as_deref(),
            )?;
            state.store.transact(|txn| {
                for record in &job_score.segments {
                    txn.put(
                        NS_SCORE,
                        &format!("{job_id}|{:05}", record.segment_index),
                        record,
                    );
                }
                txn.put(NS_JOB_REPORT, &job_id, &job_score.report);
                Ok(())
            })?;
            scored = true;
        }
    }
    Ok(JobAccepted {
        job_id,
        file_name,
        scored,
        warnings: outcome.job.warnings.clone(),
    })
}

async fn get_job(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let job: TranslationJob = state
        .store
        .get(NS_JOB, &id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("job {id} not found")))?;
    Ok(Json(job).into_response())
}

#[derive(Debug, Deserialize)]
struct ReportQuery {
    #[serde(rename = "type")]
    product_type: Option<String>,
    lang: Option<String>,
    from: Option<i64>,
    to: Option<i64>,
}

async fn get_report_card(
    State(state): State<Arc<AppState>>,
    Query(query): Query<ReportQuery>,
) -> Result<Response, ApiError> {
    let lang_pair = match &query.lang {
        Some(spec) => Some(
            spec.parse::<LangPair>()
                .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?,
        ),
        None => None,
    };
    let filter = ReportFilter {
        product_type: query.product_type,
        lang_pair,
        from: query.from,
        to: query.to,
    };
    let records: Vec<(String, SegmentScoreRecord)> = state.store.scan(NS_SCORE);
    let card = report_card(records.iter().map(|(_, r)| r), &filter);
    Ok(Json(card).into_response())
}

async fn post_feedback(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Json(event): Json<FeedbackEvent>,
) -> Result<Response, ApiError> {
    authorize(&state, &headers)?;
    let outcome = tokio::task::spawn_blocking(move || ingest_feedback(&state.store, &event))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(outcome).into_response())
}

#[derive(Debug, Deserialize)]
struct TallyQuery {
    file: String,
    lang: String,
}

async fn get_feedback_tally(
    State(state): State<Arc<AppState>>,
    Query(query): Query<TallyQuery>,
) -> Result<Response, ApiError> {
    let tally = feedback_tally(&state.store, &query.file, &query.lang).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            format!("no feedback for {} in {}", query.file, query.lang),
        )
    })?;
    Ok(Json(tally).into_response())
}

async fn get_next_review(State(state): State<Arc<AppState>>) -> Response {
    match next_review_item(&state.store) {
        Some(item) => Json(item).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    }
}

#[derive(Debug, Deserialize)]
struct ReviewUpdate {
    state: String,
}

async fn post_review_state(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    Json(update): Json<ReviewUpdate>,
) -> Result<Response, ApiError> {
    authorize(&state, &headers)?;
    let new_state = match update.state.as_str() {
        "corrected" => ReviewState::Corrected,
        "dismissed" => ReviewState::Dismissed,
        other => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                format!("unknown review state {other:?}"),
            ))
        }
    };
    let item = resolve_review_item(&state.store, &id, new_state, now_epoch())?;
    Ok(Json(item).into_response())
}

async fn get_lep_priority(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let geo = state
        .geo
        .as_ref()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no census data configured"))?;
    Ok(Json(&geo.priority).into_response())
}

async fn get_lep_cwa(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let geo = state
        .geo
        .as_ref()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no census data configured"))?;
    let stats = geo
        .stats
        .iter()
        .find(|s| s.cwa_id == id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no stats for CWA {id}")))?;
    Ok(Json(stats).into_response())
}

async fn get_translated(
    State(state): State<Arc<AppState>>,
    Path(file): Path<String>,
) -> Result<Response, ApiError> {
    let product: Product = state
        .store
        .get(NS_TRANSLATED, &file)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no product {file}")))?;
    Ok(Json(product).into_response())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/jobs", post(submit_job))
        .route("/v1/jobs/{id}", get(get_job))
        .route("/v1/reportcard", get(get_report_card))
        .route("/v1/feedback", post(post_feedback))
        .route("/v1/feedback/tally", get(get_feedback_tally))
        .route("/v1/review/next", get(get_next_review))
        .route("/v1/review/{id}", post(post_review_state))
        .route("/v1/lep/priority", get(get_lep_priority))
        .route("/v1/lep/cwa/{id}", get(get_lep_cwa))
        .route("/v1/products/{file}", get(get_translated))
        .with_state(state)
}

/// Serves the API on an already-bound listener until the task is aborted.
pub async fn serve(state: Arc<AppState>, listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
