//! Network service for the installation: sessions, the per-session
//! pipeline, an append-only event log with WebSocket replay, and panel
//! persistence.

pub mod api;
pub mod app;
pub mod config;
pub mod error;
pub mod events;
pub mod session;
pub mod store;

pub use app::App;
pub use config::{EngineConfig, ServiceConfig};
pub use error::ServiceError;
pub use events::{EventKind, SessionEvent};

use std::net::SocketAddr;
use std::sync::Arc;

/// Bind and serve until `shutdown` resolves.
pub async fn serve(
    app: Arc<App>,
    listener: tokio::net::TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, api::router(app)).with_graceful_shutdown(shutdown).await
}

/// Start an app and serve it on `bind` in the background. Returns the
/// bound address; used by tests and embedders.
pub async fn spawn(config: EngineConfig) -> Result<(SocketAddr, Arc<App>), ServiceError> {
    let listener = tokio::net::TcpListener::bind(config.service.bind).await?;
    let addr = listener.local_addr()?;
    let app = App::start(config)?;
    let served = app.clone();
    tokio::spawn(async move {
        if let Err(e) = serve(served, listener, std::future::pending()).await {
            tracing::error!(error = %e, "server stopped");
        }
    });
    Ok((addr, app))
}
