//! HTTP and WebSocket routes.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::ws::{CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;

use crate::app::App;
use crate::config::EngineConfig;
use crate::error::ServiceError;
use crate::events::SessionEvent;

type ApiResult<T> = Result<T, ServiceError>;

/// Close code sent to a subscriber that fell too far behind.
pub const CLOSE_LAGGED: u16 = 4008;

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(session_summary))
        .route("/v1/sessions/{id}/utterances", post(submit_utterance))
        .route("/v1/sessions/{id}/panels/{index}", get(panel_image))
        .route("/v1/sessions/{id}/panels/{index}/regenerate", post(regenerate))
        .route("/v1/sessions/{id}/panels/{index}/curation", post(curate))
        .route("/v1/sessions/{id}/scroll", get(viewport))
        .route("/v1/sessions/{id}/stream", get(stream))
        .route("/v1/config", get(get_config).put(put_config))
        .with_state(app)
}

fn json_body<T>(body: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    body.map(|Json(v)| v).map_err(|e| ServiceError::BadRequest(e.body_text()))
}

fn png(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "image/png")], bytes).into_response()
}

async fn create_session(State(app): State<Arc<App>>) -> ApiResult<impl IntoResponse> {
    let session = app.create_session()?;
    Ok((StatusCode::CREATED, Json(json!({ "session_id": session.id }))))
}

async fn session_summary(State(app): State<Arc<App>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(app.session(&id)?.summary()))
}

#[derive(Debug, Deserialize)]
struct UtteranceBody {
    text: String,
    seed: Option<u64>,
}

async fn submit_utterance(
    State(app): State<Arc<App>>,
    Path(id): Path<String>,
    body: Result<Json<UtteranceBody>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    app.session(&id)?;
    let body = json_body(body)?;
    let utterance_id = app.submit_utterance(&id, body.text, body.seed)?;
    Ok((StatusCode::ACCEPTED, Json(json!({ "utterance_id": utterance_id }))))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegenerateBody {
    seed: Option<u64>,
}

async fn regenerate(
    State(app): State<Arc<App>>,
    Path((id, index)): Path<(String, u64)>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let body: RegenerateBody = if body.iter().all(u8::is_ascii_whitespace) {
        RegenerateBody::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?
    };
    let seed = app.regenerate(&id, index, body.seed)?;
    Ok((StatusCode::ACCEPTED, Json(json!({ "panel_index": index, "seed": seed }))))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurationBody {
    curated: bool,
}

async fn curate(
    State(app): State<Arc<App>>,
    Path((id, index)): Path<(String, u64)>,
    body: Result<Json<CurationBody>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let session = app.session(&id)?;
    let body = json_body(body)?;
    let (curated, total_width) = session.set_curated(index, body.curated)?;
    Ok(Json(json!({ "panel_index": index, "curated": curated, "total_width": total_width })))
}

async fn panel_image(State(app): State<Arc<App>>, Path((id, index)): Path<(String, u64)>) -> ApiResult<Response> {
    let session = app.session(&id)?;
    let state = session.lock();
    let panel = state.scroll.get(index).ok_or(ServiceError::UnknownPanel(index))?;
    if panel.is_missing() {
        return Err(ServiceError::PanelUnavailable(index));
    }
    Ok(png(panel.result_png.to_vec()))
}

#[derive(Debug, Deserialize)]
struct ViewportQuery {
    offset: Option<u64>,
    width: Option<u64>,
}

/// Defaults: offset 0, width to the end of the scroll.
async fn viewport(
    State(app): State<Arc<App>>,
    Path(id): Path<String>,
    query: Result<Query<ViewportQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let session = app.session(&id)?;
    let Query(q) = query.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
    let scroll = session.lock().scroll.clone();
    let offset = q.offset.unwrap_or(0);
    let width = q.width.unwrap_or_else(|| scroll.total_width().saturating_sub(offset));
    let bytes = tokio::task::spawn_blocking(move || -> ApiResult<Vec<u8>> {
        let img = scroll.render_viewport(offset, width)?;
        img.to_png().map_err(|e| ServiceError::Internal(e.to_string()))
    })
    .await
    .map_err(|e| ServiceError::Internal(e.to_string()))??;
    Ok(png(bytes))
}

async fn get_config(State(app): State<Arc<App>>) -> Json<EngineConfig> {
    Json(app.runtime().config.clone())
}

async fn put_config(State(app): State<Arc<App>>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let text = std::str::from_utf8(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    let config = EngineConfig::from_json(text)?;
    let hash = app.update_config(config)?;
    Ok(Json(json!({ "hash": hash })))
}

#[derive(Debug, Deserialize)]
struct StreamQuery {
    #[serde(default)]
    from_seq: u64,
}

async fn stream(
    State(app): State<Arc<App>>,
    Path(id): Path<String>,
    query: Result<Query<StreamQuery>, QueryRejection>,
    ws: WebSocketUpgrade,
) -> ApiResult<Response> {
    let session = app.session(&id)?;
    let Query(q) = query.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
    let (backlog, rx) = session.subscribe(q.from_seq);
    Ok(ws.on_upgrade(move |socket| forward(socket, backlog, rx)))
}

async fn send_event(socket: &mut WebSocket, event: &SessionEvent) -> bool {
    let text = serde_json::to_string(event).expect("event serializes");
    socket.send(Message::Text(text.into())).await.is_ok()
}

/// Backlog first, then live events, skipping anything already sent.
async fn forward(
    mut socket: WebSocket,
    backlog: Vec<SessionEvent>,
    mut rx: tokio::sync::broadcast::Receiver<SessionEvent>,
) {
    let mut last_sent = 0u64;
    for event in &backlog {
        if !send_event(&mut socket, event).await {
            return;
        }
        last_sent = event.seq;
    }
    loop {
        tokio::select! {
            next = rx.recv() => match next {
                Ok(event) => {
                    if event.seq <= last_sent {
                        continue;
                    }
                    if !send_event(&mut socket, &event).await {
                        return;
                    }
                    last_sent = event.seq;
                }
                Err(RecvError::Lagged(missed)) => {
                    tracing::warn!(missed, "subscriber lagged, disconnecting");
                    let frame = CloseFrame { code: CLOSE_LAGGED, reason: "subscriber lagged".into() };
                    let _ = socket.send(Message::Close(Some(frame))).await;
                    return;
                }
                Err(RecvError::Closed) => return,
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}
