//! Operator HTTP API.

use axum::body::Body;
use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::{broadcast, mpsc, oneshot};
use tokio_util::sync::CancellationToken;

use super::engine::{ApiError, Command};
use super::events::{BeaconView, ErrorBody, ModeBody, OutboundEvent, PointerBody};

#[derive(Clone)]
pub(crate) struct AppState {
    pub commands: mpsc::Sender<Command>,
    pub events: broadcast::Sender<OutboundEvent>,
    pub cancel: CancellationToken,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(ErrorBody { error: self.to_string() })).into_response()
    }
}

fn bad_json(e: JsonRejection) -> ApiError {
    ApiError::BadRequest(e.body_text())
}

pub(crate) fn router(state: AppState) -> Router {
    Router::new()
        .route("/state", get(get_state))
        .route("/beacons", get(get_beacons))
        .route("/mode", post(post_mode))
        .route("/pointer", post(post_pointer))
        .route("/events", get(get_events))
        .with_state(state)
}

async fn call<T>(
    state: &AppState,
    make: impl FnOnce(oneshot::Sender<Result<T, ApiError>>) -> Command,
) -> Result<T, ApiError> {
    let (tx, rx) = oneshot::channel();
    state.commands.send(make(tx)).await.map_err(|_| ApiError::Unavailable)?;
    rx.await.map_err(|_| ApiError::Unavailable)?
}

async fn snapshot(state: &AppState) -> Result<super::events::StateSnapshot, ApiError> {
    let (tx, rx) = oneshot::channel();
    state.commands.send(Command::State(tx)).await.map_err(|_| ApiError::Unavailable)?;
    rx.await.map_err(|_| ApiError::Unavailable)
}

async fn get_state(State(state): State<AppState>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(snapshot(&state).await?))
}

async fn get_beacons(State(state): State<AppState>) -> Result<Json<Vec<BeaconView>>, ApiError> {
    Ok(Json(snapshot(&state).await?.beacons))
}

async fn post_mode(
    State(state): State<AppState>,
    body: Result<Json<ModeBody>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Json(body) = body.map_err(bad_json)?;
    Ok(Json(call(&state, |tx| Command::SetMode(body.mode, tx)).await?))
}

async fn post_pointer(
    State(state): State<AppState>,
    body: Result<Json<PointerBody>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Json(body) = body.map_err(bad_json)?;
    Ok(Json(call(&state, |tx| Command::Pointer(body.to_event(), tx)).await?))
}

/// Line-delimited JSON stream of [`OutboundEvent`]s. A subscriber that falls
/// behind the broadcast buffer is disconnected.
async fn get_events(State(state): State<AppState>) -> Response {
    let rx = state.events.subscribe();
    let stream = futures::stream::unfold((rx, state.cancel.clone()), |(mut rx, cancel)| async move {
        let next = tokio::select! {
            _ = cancel.cancelled() => return None,
            next = rx.recv() => next,
        };
        match next {
            Ok(event) => {
                let mut line = serde_json::to_vec(&event).expect("event serializes");
                line.push(b'\n');
                Some((Ok::<_, std::convert::Infallible>(line), (rx, cancel)))
            }
            Err(broadcast::error::RecvError::Lagged(n)) => {
                tracing::warn!("dropping slow event subscriber ({n} events behind)");
                None
            }
            Err(broadcast::error::RecvError::Closed) => None,
        }
    });
    Response::builder()
        .status(StatusCode::OK)
        .header(header::CONTENT_TYPE, "application/x-ndjson")
        .header(header::CACHE_CONTROL, "no-cache")
        .body(Body::from_stream(stream))
        .expect("valid response")
}
