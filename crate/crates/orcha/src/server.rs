//! HTTP API and push channel over one authoring session.
//!
//! Ops are applied in arrival order under a fair async mutex; reads see the
//! last committed revision.

use std::convert::Infallible;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream, StreamExt};
use orcha_core::session::{save_dir, EditOp, Session};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::{broadcast, Mutex};

/// Shared service state.
pub struct AppState {
    session: Mutex<Session>,
    data_dir: PathBuf,
    updates: broadcast::Sender<String>,
}

pub type Shared = Arc<AppState>;

impl AppState {
    pub fn new(session: Session, data_dir: PathBuf) -> Shared {
        let (updates, _) = broadcast::channel(64);
        Arc::new(AppState {
            session: Mutex::new(session),
            data_dir,
            updates,
        })
    }

    /// Receives one message per committed revision or relayout.
    pub fn subscribe(&self) -> broadcast::Receiver<String> {
        self.updates.subscribe()
    }
}

fn update_message(session: &Session) -> String {
    json!({ "revision": session.revision(), "layout": session.layout() }).to_string()
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/chart", get(chart))
        .route("/api/csv", get(csv))
        .route("/api/layout", get(layout))
        .route("/api/svg", get(svg))
        .route("/api/config", get(config))
        .route("/api/events", get(events))
        .route("/api/ops", post(ops))
        .route("/api/save", post(save))
        .route("/api/relayout", post(relayout))
        .with_state(state)
}

async fn chart(State(state): State<Shared>) -> Response {
    let session = state.session.lock().await;
    let mut response = Json(session.spec()).into_response();
    response
        .headers_mut()
        .insert("x-orcha-revision", session.revision().into());
    response
}

async fn csv(State(state): State<Shared>) -> Json<Value> {
    let session = state.session.lock().await;
    let csv = session.spec().to_csv();
    Json(json!({
        "revision": session.revision(),
        "streams": csv.streams,
        "links": csv.links,
        "labels": csv.labels,
    }))
}

async fn layout(State(state): State<Shared>) -> Json<Value> {
    let session = state.session.lock().await;
    Json(serde_json::to_value(session.layout()).expect("layout serializes"))
}

#[derive(Debug, Deserialize)]
struct SvgQuery {
    rev: Option<u64>,
}

async fn svg(State(state): State<Shared>, Query(q): Query<SvgQuery>) -> Response {
    let session = state.session.lock().await;
    let doc = match q.rev {
        None => Some(session.svg()),
        Some(rev) => session.svg_at(rev),
    };
    match doc {
        Some(doc) => ([(header::CONTENT_TYPE, "image/svg+xml")], doc.xml).into_response(),
        None => (
            StatusCode::NOT_FOUND,
            Json(json!({ "error": format!("no revision {}", q.rev.unwrap_or_default()) })),
        )
            .into_response(),
    }
}

async fn config(State(state): State<Shared>) -> Json<Value> {
    let session = state.session.lock().await;
    Json(serde_json::to_value(session.config()).expect("config serializes"))
}

async fn ops(State(state): State<Shared>, Json(op): Json<EditOp>) -> Response {
    let mut session = state.session.lock().await;
    match session.apply_edit(&op) {
        Ok(outcome) => {
            let _ = state.updates.send(update_message(&session));
            Json(outcome).into_response()
        }
        Err(rejection) => (
            StatusCode::UNPROCESSABLE_ENTITY,
            Json(json!({
                "error": rejection.message,
                "violations": rejection.violations,
                "revision": session.revision(),
            })),
        )
            .into_response(),
    }
}

async fn save(State(state): State<Shared>) -> Response {
    let session = state.session.lock().await;
    match save_dir(&state.data_dir, session.spec()) {
        Ok(()) => Json(json!({
            "revision": session.revision(),
            "dir": state.data_dir.display().to_string(),
        }))
        .into_response(),
        Err(e) => (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(json!({ "error": e.to_string() })),
        )
            .into_response(),
    }
}

async fn relayout(State(state): State<Shared>) -> Json<Value> {
    let mut session = state.session.lock().await;
    let ticks = session.relayout_full();
    let _ = state.updates.send(update_message(&session));
    Json(json!({ "revision": session.revision(), "ticks": ticks }))
}

async fn events(
    State(state): State<Shared>,
) -> Sse<impl Stream<Item = Result<Event, Infallible>>> {
    let (first, rx) = {
        let session = state.session.lock().await;
        (update_message(&session), state.updates.subscribe())
    };
    let rest = stream::unfold(rx, |mut rx| async move {
        loop {
            match rx.recv().await {
                Ok(msg) => return Some((msg, rx)),
                Err(broadcast::error::RecvError::Lagged(n)) => {
                    log::warn!("push subscriber skipped {n} updates");
                }
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    let messages = stream::once(async move { first })
        .chain(rest)
        .map(|msg| Ok(Event::default().event("revision").data(msg)));
    Sse::new(messages).keep_alive(KeepAlive::default())
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Binds `host:port`. A busy port is reported here, before serving starts.
pub async fn bind(host: &str, port: u16) -> Result<tokio::net::TcpListener, ServeError> {
    let addr = format!("{host}:{port}");
    tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })
}

pub async fn serve(listener: tokio::net::TcpListener, state: Shared) -> Result<(), ServeError> {
    let addr: Option<SocketAddr> = listener.local_addr().ok();
    if let Some(addr) = addr {
        log::info!("listening on http://{addr}");
    }
    axum::serve(listener, router(state)).await?;
    Ok(())
}
