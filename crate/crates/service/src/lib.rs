//! Session server for live play: a human Client against one of the library's
//! Waiter strategies.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | `{"n":15,"goal":"clique:4","waiter":"clique_builder","seed":1}` | `{"id", "rounds", "offer"}` |
//! | GET | `/sessions/{id}` | | full view |
//! | POST | `/sessions/{id}/choice` | `{"edge":3}` or `{"edge":[0,3]}`, optional `"round"` | `{"rounds","last","offer"}` or `{..,"result"}` |
//! | GET | `/sessions/{id}/transcript` | | transcript text |
//! | GET | `/sessions/{id}/stream` | WebSocket | progress events |
//!
//! Edges in replies are always canonical indices.

mod http;
pub mod session;
pub mod store;

use std::net::SocketAddr;
use std::sync::Arc;

use thiserror::Error;

pub use http::router;
pub use session::{ChoiceRequest, EdgeRef, Progress, SessionConfig, SessionView};
pub use store::SessionStore;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("no session {0}")]
    NotFound(String),
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("session {id} is corrupt: {reason}")]
    Corrupt { id: String, reason: String },
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Serves `store` on `addr` until ctrl-c.
pub async fn serve(addr: SocketAddr, store: Arc<SessionStore>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
