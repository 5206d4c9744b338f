use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use vocmorph_core::Error;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            kind,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_payload", message)
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("unknown {what} {id}"),
        )
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, kind) = match &e {
            Error::InvalidAnchors(_) => (StatusCode::CONFLICT, "invalid_anchors"),
            Error::InvalidWeights { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_weights"),
            Error::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
            Error::OutOfRange(_) => (StatusCode::BAD_REQUEST, "out_of_range"),
            Error::RateMismatch(..) => (StatusCode::BAD_REQUEST, "rate_mismatch"),
            Error::GridMismatch(_) => (StatusCode::BAD_REQUEST, "grid_mismatch"),
            Error::AnchorTopologyMismatch(_) => {
                (StatusCode::BAD_REQUEST, "anchor_topology_mismatch")
            }
            Error::NotAVocpFile
            | Error::CorruptFile(_)
            | Error::UnsupportedVersion(_)
            | Error::InvalidObjectFile(_)
            | Error::UnsupportedFormat(_) => (StatusCode::BAD_REQUEST, "bad_file"),
            _ => (StatusCode::BAD_REQUEST, "invalid_input"),
        };
        Self::new(status, kind, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({ "error": self.kind, "message": self.message })),
        )
            .into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
