use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use equivalence_core::scroll::ScrollError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unknown panel {0}")]
    UnknownPanel(u64),
    #[error("panel {0} has no stored image")]
    PanelUnavailable(u64),
    #[error("utterance is empty")]
    EmptyInput,
    #[error("utterance has {len} characters, limit is {max}")]
    TextTooLong { len: usize, max: usize },
    #[error("{0}")]
    OutOfRange(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{0} can only change with a restart")]
    RestartRequired(&'static str),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("storage: {0}")]
    Storage(#[from] std::io::Error),
    #[error("corrupt log {path}: {message}")]
    CorruptLog { path: String, message: String },
    #[error("{0}")]
    Internal(String),
}

impl ServiceError {
    pub fn kind(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::UnknownPanel(_) => "UnknownPanel",
            ServiceError::PanelUnavailable(_) => "PanelUnavailable",
            ServiceError::EmptyInput => "EmptyInput",
            ServiceError::TextTooLong { .. } => "TextTooLong",
            ServiceError::OutOfRange(_) => "OutOfRange",
            ServiceError::InvalidConfig(_) => "InvalidConfig",
            ServiceError::RestartRequired(_) => "RestartRequired",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Storage(_) => "StorageError",
            ServiceError::CorruptLog { .. } => "CorruptLog",
            ServiceError::Internal(_) => "Internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownSession(_) | ServiceError::UnknownPanel(_) => StatusCode::NOT_FOUND,
            ServiceError::PanelUnavailable(_) | ServiceError::RestartRequired(_) => StatusCode::CONFLICT,
            ServiceError::EmptyInput
            | ServiceError::TextTooLong { .. }
            | ServiceError::OutOfRange(_)
            | ServiceError::InvalidConfig(_)
            | ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Storage(_) | ServiceError::CorruptLog { .. } | ServiceError::Internal(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        }
    }
}

impl From<ScrollError> for ServiceError {
    fn from(e: ScrollError) -> Self {
        match e {
            ScrollError::UnknownPanel(i) => ServiceError::UnknownPanel(i),
            ScrollError::OutOfRange { .. } => ServiceError::OutOfRange(e.to_string()),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        let body = serde_json::json!({ "error": self.kind(), "message": self.to_string() });
        (self.status(), Json(body)).into_response()
    }
}
