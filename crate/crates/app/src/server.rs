//! Stateless JSON service.
//!
//! - `GET /api/health`
//! - `POST /api/parse` `{"expr": "..."}`: the parsed equation, or the error
//!   with its byte offset
//! - `POST /api/scene` with a job: scene JSON
//! - `POST /api/render` with a job: SVG
//!
//! Faults of the request get 400 and `{"error": ..., "offset": ...}`.

use crate::config::Config;
use crate::job::{self, Format, JobSpec};
use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dform_core::expr::{Expr, Var};
use dform_core::Error;
use serde::Deserialize;
use serde_json::json;
use std::sync::Arc;

struct ApiError {
    status: StatusCode,
    message: String,
    offset: Option<usize>,
}

impl From<Error> for ApiError {
    fn from(e: Error) -> ApiError {
        ApiError {
            status: if e.is_user_error() {
                StatusCode::BAD_REQUEST
            } else {
                StatusCode::INTERNAL_SERVER_ERROR
            },
            offset: e.parse_error().map(|p| p.offset),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(o) = self.offset {
            body["offset"] = json!(o);
        }
        (self.status, Json(body)).into_response()
    }
}

fn bad_json(e: serde_json::Error) -> ApiError {
    ApiError {
        status: StatusCode::BAD_REQUEST,
        message: format!("bad request body: {e}"),
        offset: None,
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseRequest {
    expr: String,
}

async fn parse(body: Bytes) -> Result<Json<serde_json::Value>, ApiError> {
    let req: ParseRequest = serde_json::from_slice(&body).map_err(bad_json)?;
    let e: Expr = req.expr.parse().map_err(Error::from)?;
    let vars: Vec<&str> = [Var::X, Var::Y]
        .into_iter()
        .filter(|v| e.contains_var(*v))
        .map(Var::name)
        .collect();
    Ok(Json(json!({
        "expr": e.to_string(),
        "nodes": e.node_count(),
        "depth": e.depth(),
        "vars": vars,
    })))
}

async fn run_job(config: Arc<Config>, body: Bytes, format: Format) -> Result<String, ApiError> {
    let job: JobSpec = serde_json::from_slice(&body).map_err(bad_json)?;
    let out = tokio::task::spawn_blocking(move || {
        job::evaluate(&job, &config).and_then(|r| r.write(format, &config))
    })
    .await
    .map_err(|e| Error::Internal(format!("job failed: {e}")))??;
    Ok(out)
}

async fn scene(State(config): State<Arc<Config>>, body: Bytes) -> Result<Response, ApiError> {
    let text = run_job(config, body, Format::SceneJson).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}

async fn render(State(config): State<Arc<Config>>, body: Bytes) -> Result<Response, ApiError> {
    let text = run_job(config, body, Format::Svg).await?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], text).into_response())
}

pub fn router(config: Config) -> Router {
    let limit = config.body_limit;
    Router::new()
        .route("/api/health", get(health))
        .route("/api/parse", post(parse))
        .route("/api/scene", post(scene))
        .route("/api/render", post(render))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(Arc::new(config))
}

pub async fn serve(config: Config) -> std::io::Result<()> {
    let addr = format!("{}:{}", config.bind, config.port);
    let listener = tokio::net::TcpListener::bind(&addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
