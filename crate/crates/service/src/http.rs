//! JSON endpoints, the frame stream and static UI serving.

use std::convert::Infallible;
use std::path::PathBuf;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tokio_stream::{Stream, StreamExt};
use tower_http::services::ServeDir;

use crate::config::{FieldError, SessionConfig};
use crate::session::{ControlCommand, SessionError};
use crate::worker::Registry;

const FALLBACK_INDEX: &str = include_str!("index.html");

pub enum ApiError {
    NotFound,
    Invalid(Vec<FieldError>),
    Internal(String),
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Invalid(errors) => ApiError::Invalid(errors),
            SessionError::Runtime(m) => ApiError::Internal(m),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::Invalid(vec![FieldError::new("body", r.body_text())])
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::NotFound => (StatusCode::NOT_FOUND, Json(json!({"error": "session not found"}))).into_response(),
            ApiError::Invalid(errors) => {
                (StatusCode::UNPROCESSABLE_ENTITY, Json(json!({ "errors": errors }))).into_response()
            }
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": m }))).into_response(),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn create(
    State(registry): State<Registry>,
    body: Result<Json<SessionConfig>, JsonRejection>,
) -> ApiResult<Json<serde_json::Value>> {
    let Json(config) = body?;
    let id = tokio::task::spawn_blocking(move || registry.create(config))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(json!({ "session_id": id })))
}

async fn control(
    State(registry): State<Registry>,
    Path(id): Path<String>,
    body: Result<Json<ControlCommand>, JsonRejection>,
) -> ApiResult<Json<serde_json::Value>> {
    let handle = registry.get(&id).ok_or(ApiError::NotFound)?;
    let Json(command) = body?;
    let state = handle.control(command).await?;
    Ok(Json(json!({ "state": state })))
}

async fn snapshot(State(registry): State<Registry>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = registry.get(&id).ok_or(ApiError::NotFound)?;
    Ok(Json(&*handle.snapshot()).into_response())
}

async fn metrics(State(registry): State<Registry>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = registry.get(&id).ok_or(ApiError::NotFound)?;
    let rows = handle.history().await?;
    Ok(Json(rows).into_response())
}

async fn delete(State(registry): State<Registry>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    if registry.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::NotFound)
    }
}

async fn stream(
    State(registry): State<Registry>,
    Path(id): Path<String>,
) -> ApiResult<Sse<impl Stream<Item = Result<Event, Infallible>>>> {
    let handle = registry.get(&id).ok_or(ApiError::NotFound)?;
    let frames = handle.subscribe().map(|frame| {
        let event = Event::default()
            .event("frame")
            .id(format!("{}-{}-{}", frame.generation, frame.epoch, frame.step));
        Ok(match serde_json::to_string(&*frame) {
            Ok(body) => event.data(body),
            Err(e) => Event::default().event("error").data(e.to_string()),
        })
    });
    Ok(Sse::new(frames).keep_alive(KeepAlive::new().interval(Duration::from_secs(15))))
}

async fn fallback_index() -> Html<&'static str> {
    Html(FALLBACK_INDEX)
}

/// The full API. Static files come from `ui_dir` when given, otherwise `/`
/// serves a small built-in page.
pub fn router(registry: Registry, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", axum::routing::delete(delete))
        .route("/sessions/{id}/control", post(control))
        .route("/sessions/{id}/snapshot", get(snapshot))
        .route("/sessions/{id}/metrics", get(metrics))
        .route("/sessions/{id}/stream", get(stream))
        .with_state(registry);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api.route("/", get(fallback_index)),
    }
}
