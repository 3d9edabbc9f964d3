//! Axum routes over a [`SessionStore`].

use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;

use crate::session::{ChoiceRequest, Progress, SessionConfig};
use crate::store::SessionStore;
use crate::ServiceError;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Io(_) | ServiceError::Corrupt { .. } | ServiceError::Internal(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

type AppState = Arc<SessionStore>;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(state))
        .route("/sessions/{id}/choice", post(choice))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/sessions/{id}/stream", get(stream))
        .with_state(store)
}

async fn blocking<T, F>(f: F) -> Result<T, ServiceError>
where
    F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))?
}

async fn create(State(store): State<AppState>, body: String) -> Result<Response, ServiceError> {
    let config = SessionConfig::parse(&body)?;
    let (id, progress) = blocking(move || store.create(config)).await?;
    let mut doc = serde_json::to_value(&progress).expect("progress serializes");
    doc["id"] = json!(id);
    Ok((StatusCode::CREATED, Json(doc)).into_response())
}

async fn state(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(store.view(&id)?).into_response())
}

async fn choice(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: String,
) -> Result<Json<Progress>, ServiceError> {
    let req = ChoiceRequest::parse(&body)?;
    let progress = blocking(move || store.submit(&id, &req)).await?;
    Ok(Json(progress))
}

async fn transcript(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let text = store.transcript(&id)?.to_text();
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}

async fn stream(
    State(store): State<AppState>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ServiceError> {
    let slot = store.slot(&id)?;
    Ok(ws.on_upgrade(move |socket| async move {
        let (current, rx) = slot.subscribe();
        push_events(socket, current, rx).await;
    }))
}

async fn push_events(mut socket: WebSocket, current: Progress, mut rx: tokio::sync::broadcast::Receiver<Progress>) {
    let encode = |p: &Progress| Message::Text(serde_json::to_string(p).expect("progress serializes").into());
    if socket.send(encode(&current)).await.is_err() {
        return;
    }
    let mut done = current.result.is_some();
    while !done {
        tokio::select! {
            ev = rx.recv() => match ev {
                Ok(p) => {
                    done = p.result.is_some();
                    if socket.send(encode(&p)).await.is_err() {
                        return;
                    }
                }
                Err(RecvError::Lagged(_)) => {
                    let msg = Message::Text(json!({"error": "stream lagged, refetch state"}).to_string().into());
                    let _ = socket.send(msg).await;
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
    let _ = socket.send(Message::Close(None)).await;
}
