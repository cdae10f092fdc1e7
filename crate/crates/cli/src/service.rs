//! HTTP/JSON service over a session.
//!
//! Mutations go through the write half of one lock, so they are applied one
//! at a time; reads share the lock and see a consistent store.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::RwLock;

use setsig_core::net::{export_net, NetFormat};
use setsig_core::recognition::{builtin_catalog, recognize};
use setsig_core::rules::{ObjectId, RuleError};

use crate::ops::{self, OpError, Row, RuleRequest};
use crate::session::Session;

pub struct ServiceState {
    pub session: Session,
    path: Option<PathBuf>,
    /// File contents as last loaded or saved, to detect outside changes.
    on_disk: Option<String>,
}

#[derive(Clone)]
pub struct AppState(Arc<RwLock<ServiceState>>);

impl AppState {
    pub fn new(session: Session, path: Option<PathBuf>) -> Self {
        let on_disk = path.as_ref().and_then(|p| std::fs::read_to_string(p).ok());
        AppState(Arc::new(RwLock::new(ServiceState {
            session,
            path,
            on_disk,
        })))
    }

    pub async fn session(&self) -> Session {
        self.0.read().await.session.clone()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_owned(),
            message: message.into(),
        }
    }
}

impl From<OpError> for ApiError {
    fn from(e: OpError) -> Self {
        let status = if e.is_not_found() {
            StatusCode::NOT_FOUND
        } else {
            StatusCode::BAD_REQUEST
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({ "code": self.code, "message": self.message })),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", e.to_string()))
}

#[derive(Serialize)]
struct Mutation {
    row: Row,
    already_present: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DescriptionBody {
    text: Option<String>,
    #[serde(default)]
    lang: Option<String>,
}

async fn health(State(state): State<AppState>) -> Json<Value> {
    let s = state.0.read().await;
    Json(json!({ "status": "ok", "objects": s.session.store.len() }))
}

async fn list_objects(State(state): State<AppState>) -> Json<Vec<Row>> {
    {
        let s = state.0.read().await;
        if ops::fully_cached(&s.session) {
            let rows = (1..=s.session.store.len())
                .map(|id| ops::cached_row(&s.session, id).expect("ids are dense"))
                .collect();
            return Json(rows);
        }
    }
    let mut s = state.0.write().await;
    Json(ops::rows(&mut s.session))
}

async fn get_object(State(state): State<AppState>, Path(id): Path<ObjectId>) -> ApiResult<Row> {
    let mut s = state.0.write().await;
    Ok(Json(ops::row(&mut s.session, id)?))
}

async fn apply_rule(
    State(state): State<AppState>,
    Path(rule): Path<String>,
    body: Bytes,
) -> ApiResult<Mutation> {
    let known = ["negate", "connect", "quantify", "truth-set", "substitute"];
    if !known.contains(&rule.as_str()) {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "UnknownRule", format!("no rule `{rule}`")));
    }
    let fields: Value = parse_body(&body)?;
    let request: RuleRequest = serde_json::from_value(json!({ rule: fields }))
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", e.to_string()))?;
    let mut s = state.0.write().await;
    let applied = request.apply(&mut s.session)?;
    Ok(Json(Mutation {
        row: ops::row(&mut s.session, applied.id)?,
        already_present: applied.already_present,
    }))
}

async fn set_description(
    State(state): State<AppState>,
    Path(id): Path<ObjectId>,
    body: Bytes,
) -> ApiResult<Row> {
    let b: DescriptionBody = parse_body(&body)?;
    let mut s = state.0.write().await;
    s.session.store.get(id).map_err(OpError::from)?;
    match (b.lang, b.text) {
        (None, text) => s.session.store.set_description(id, text).map_err(OpError::from)?,
        (Some(lang), Some(text)) => s.session.glossary.set(id, &lang, text),
        (Some(_), None) => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "BadRequest",
                "a glossary entry needs text",
            ))
        }
    }
    Ok(Json(ops::row(&mut s.session, id)?))
}

async fn classify(State(state): State<AppState>, Path(id): Path<ObjectId>) -> ApiResult<Value> {
    let mut s = state.0.write().await;
    let k = s.session.config.model_check_size;
    match s.session.classify_object(id)? {
        Some(c) => Ok(Json(json!({
            "object_id": id,
            "k": k,
            "label": c.label(),
            "classification": c,
        }))),
        None => Err(OpError::from(RuleError::NotAFormula(id)).into()),
    }
}

async fn recognize_object(State(state): State<AppState>, Path(id): Path<ObjectId>) -> ApiResult<Value> {
    let mut s = state.0.write().await;
    let k = s.session.config.model_check_size;
    let result = recognize(&mut s.session.store, id, &builtin_catalog(), k).map_err(OpError::from)?;
    Ok(Json(serde_json::to_value(result).expect("result serializes")))
}

async fn net(State(state): State<AppState>) -> Result<Response, ApiError> {
    let s = state.0.read().await;
    let graph = ops::net(&s.session)?;
    Ok((
        [(header::CONTENT_TYPE, "application/json")],
        export_net(&graph, NetFormat::Json),
    )
        .into_response())
}

async fn export_dot(State(state): State<AppState>) -> Result<Response, ApiError> {
    let s = state.0.read().await;
    let graph = ops::net(&s.session)?;
    Ok((
        [(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")],
        export_net(&graph, NetFormat::Dot),
    )
        .into_response())
}

async fn save(State(state): State<AppState>) -> ApiResult<Value> {
    let mut s = state.0.write().await;
    let Some(path) = s.path.clone() else {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "NoSessionPath",
            "the service was started without a session file",
        ));
    };
    let current = std::fs::read_to_string(&path).ok();
    if current != s.on_disk {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "SessionConflict",
            format!("{} changed on disk since it was loaded", path.display()),
        ));
    }
    let json = s.session.to_json();
    std::fs::write(&path, &json)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IoFailure", e.to_string()))?;
    s.on_disk = Some(json);
    Ok(Json(json!({ "saved": path.display().to_string(), "objects": s.session.store.len() })))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/objects", get(list_objects))
        .route("/objects/{id}", get(get_object))
        .route("/objects/{id}/description", post(set_description))
        .route("/objects/{id}/classify", get(classify))
        .route("/objects/{id}/recognize", get(recognize_object))
        .route("/rules/{rule}", post(apply_rule))
        .route("/net", get(net))
        .route("/export/dot", get(export_dot))
        .route("/session/save", post(save))
        .with_state(state)
}

pub async fn serve(state: AppState, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
