//! HTTP front end over one [`Episode`]. Mutations are single-writer: a
//! request that finds another mutation in flight gets 409 `conflict`.

use std::collections::BTreeMap;
use std::future::Future;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dronebench_core::episodes::ActionOutcome;
use dronebench_core::protocol::{encode_observation, ParamValue};
use dronebench_core::world::rasterize;
use dronebench_core::{AgentAction, Episode, TaskSpec, WireError, WireErrorCode};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::{Mutex, RwLock};

use crate::files::{numbered_log_path, FileError, LogWriter};

pub const ADDR_ENV: &str = "DRONEBENCH_ADDR";
pub const DEFAULT_ADDR: &str = "127.0.0.1:8000";
pub const OBSERVATION_HEADER: &str = "x-observation";

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub spec: TaskSpec,
    pub log_path: PathBuf,
    pub full_snapshots: bool,
}

#[derive(Debug)]
struct Session {
    episode: Episode,
    writer: LogWriter,
    serial: u32,
}

#[derive(Debug)]
pub struct AppState {
    config: ServerConfig,
    gate: Mutex<()>,
    session: RwLock<Session>,
}

pub type Shared = Arc<AppState>;

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("invalid task: {0}")]
    Task(dronebench_core::tasks::TaskError),
    #[error(transparent)]
    File(#[from] FileError),
}

fn open_session(config: &ServerConfig, spec: &TaskSpec, serial: u32) -> Result<Session, ServeError> {
    let episode = Episode::start(spec, config.full_snapshots).map_err(ServeError::Task)?;
    let writer = LogWriter::create(&numbered_log_path(&config.log_path, serial), &episode.log)?;
    Ok(Session {
        episode,
        writer,
        serial,
    })
}

impl AppState {
    pub fn new(config: ServerConfig) -> Result<Shared, ServeError> {
        let session = open_session(&config, &config.spec, 0)?;
        Ok(Arc::new(AppState {
            config,
            gate: Mutex::new(()),
            session: RwLock::new(session),
        }))
    }
}

pub fn status_for(code: WireErrorCode) -> StatusCode {
    match code {
        WireErrorCode::BadAction
        | WireErrorCode::BadParams
        | WireErrorCode::ParseFailure
        | WireErrorCode::DegenerateBearing => StatusCode::BAD_REQUEST,
        WireErrorCode::ToolUnavailable | WireErrorCode::NoCargo => StatusCode::UNPROCESSABLE_ENTITY,
        WireErrorCode::EpisodeNotRunning | WireErrorCode::Conflict => StatusCode::CONFLICT,
    }
}

fn wire(err: WireError) -> Response {
    (status_for(err.code), Json(json!({ "error": err }))).into_response()
}

fn conflict() -> Response {
    wire(WireError::new(
        WireErrorCode::Conflict,
        "another mutation is in progress",
    ))
}

fn internal(e: impl std::fmt::Display) -> Response {
    (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResetRequest {
    #[serde(default)]
    force: bool,
    #[serde(default)]
    seed: Option<u64>,
}

async fn reset(State(app): State<Shared>, body: Bytes) -> Response {
    let req: ResetRequest = if body.iter().all(u8::is_ascii_whitespace) {
        ResetRequest::default()
    } else {
        match serde_json::from_slice(&body) {
            Ok(r) => r,
            Err(e) => return wire(WireError::new(WireErrorCode::BadParams, e.to_string())),
        }
    };
    let Ok(_gate) = app.gate.try_lock() else {
        return conflict();
    };
    let mut s = app.session.write().await;
    let touched = !s.episode.log.events.is_empty();
    if touched && s.episode.is_running() && !req.force {
        return wire(WireError::new(
            WireErrorCode::Conflict,
            "an episode is in progress; reset with force to abandon it",
        ));
    }
    let mut spec = app.config.spec.clone();
    if let Some(seed) = req.seed {
        spec.scene.seed = seed;
    }
    let serial = s.serial + u32::from(touched);
    match open_session(&app.config, &spec, serial) {
        Ok(fresh) => *s = fresh,
        Err(ServeError::Task(e)) => return wire(e.into()),
        Err(e) => return internal(e),
    }
    Json(json!({
        "log": s.writer.path(),
        "spec_hash": s.episode.log.header.spec_hash,
        "seed": spec.scene.seed,
        "status": s.episode.status(),
    }))
    .into_response()
}

async fn task_status(State(app): State<Shared>) -> Response {
    let s = app.session.read().await;
    let ep = &s.episode;
    let stage = ep.runtime.current_stage;
    Json(json!({
        "running": ep.is_running(),
        "kind": ep.runtime.spec.kind,
        "mode": ep.runtime.spec.mode,
        "stage_name": ep.runtime.spec.kind.stage_names().get(stage),
        "interactions": ep.log.last_tick(),
        "status": ep.status(),
        "log": s.writer.path(),
    }))
    .into_response()
}

async fn get_image(State(app): State<Shared>) -> Response {
    let s = app.session.read().await;
    let w = &s.episode.world;
    let obs = s.episode.observation();
    let raster = rasterize(&obs, w.scenario, w.config.image_width, w.config.image_height);
    let mut headers = HeaderMap::new();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("image/x-portable-pixmap"));
    match HeaderValue::from_str(&encode_observation(&obs)) {
        Ok(v) => headers.insert(OBSERVATION_HEADER, v),
        Err(e) => return internal(e),
    };
    (headers, raster.to_ppm()).into_response()
}

async fn observation(State(app): State<Shared>) -> Response {
    let s = app.session.read().await;
    (
        [(header::CONTENT_TYPE, "application/json")],
        encode_observation(&s.episode.observation()),
    )
        .into_response()
}

async fn prompt(State(app): State<Shared>) -> Response {
    let s = app.session.read().await;
    match s.episode.prompt() {
        Ok(text) => ([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response(),
        Err(e) => wire(e),
    }
}

async fn state(State(app): State<Shared>) -> Response {
    let s = app.session.read().await;
    let w = &s.episode.world;
    let spec = &s.episode.runtime.spec;
    Json(json!({
        "scenario": w.scenario,
        "tick": w.tick,
        "uav": w.uav,
        "active_camera": w.active_camera,
        "config": w.config,
        "task": { "kind": spec.kind, "mode": spec.mode, "stage": spec.stage },
    }))
    .into_response()
}

/// Submits one verbatim reply; every alias funnels through here.
pub async fn apply(app: &AppState, reply: &str) -> Response {
    let Ok(_gate) = app.gate.try_lock() else {
        return conflict();
    };
    let mut s = app.session.write().await;
    let result = s.episode.submit(reply);
    let Session { episode, writer, .. } = &mut *s;
    if let Err(e) = writer.sync(&episode.log) {
        return internal(e);
    }
    let i = match result {
        Ok(i) => i,
        Err(e) => return wire(e),
    };
    let code = match &i.outcome {
        ActionOutcome::Rejected { error } => status_for(error.code),
        _ => StatusCode::OK,
    };
    let body = json!({
        "tick": i.tick,
        "action": i.action,
        "outcome": i.outcome,
        "status": i.status,
    });
    (code, Json(body)).into_response()
}

async fn action(State(app): State<Shared>, body: String) -> Response {
    apply(&app, &body).await
}

/// Builds the generic action for an alias route from its JSON params.
fn alias_action(name: &str, body: &[u8]) -> Result<AgentAction, WireError> {
    let bad = |m: String| WireError::new(WireErrorCode::BadParams, m);
    let mut fields: BTreeMap<String, Value> = if body.iter().all(u8::is_ascii_whitespace) {
        BTreeMap::new()
    } else {
        serde_json::from_slice(body).map_err(|e| bad(format!("body must be a JSON object: {e}")))?
    };
    let analysis = match fields.remove("analysis") {
        None => String::new(),
        Some(Value::String(s)) => s,
        Some(_) => return Err(bad("analysis must be a string".into())),
    };
    let name = if name == "sprayer" {
        match fields.remove("on") {
            Some(Value::Bool(true)) => "sprayer_on",
            Some(Value::Bool(false)) => "sprayer_off",
            _ => return Err(bad("sprayer needs a boolean `on`".into())),
        }
    } else {
        name
    };
    let mut action = AgentAction::new(name).with_analysis(&analysis);
    for (k, v) in fields {
        let p: ParamValue =
            serde_json::from_value(v).map_err(|_| bad(format!("param `{k}` must be a bool, number or string")))?;
        action.params.insert(k, p);
    }
    Ok(action)
}

async fn alias(app: Shared, name: &'static str, body: Bytes) -> Response {
    match alias_action(name, &body) {
        Ok(a) => apply(&app, &serde_json::to_string(&a).expect("actions serialize")).await,
        Err(e) => wire(e),
    }
}

pub fn router(app: Shared) -> Router {
    let mut r = Router::new()
        .route("/task/reset", post(reset))
        .route("/task/status", get(task_status))
        .route("/get_image", get(get_image))
        .route("/observation", get(observation))
        .route("/prompt", get(prompt))
        .route("/state", get(state))
        .route("/action", post(action));
    for name in ["land", "takeoff", "fly_to", "switch_camera", "release_cargo", "sprayer"] {
        r = r.route(
            &format!("/{name}"),
            post(move |State(app): State<Shared>, body: Bytes| alias(app, name, body)),
        );
    }
    r.with_state(app)
}

pub async fn serve(
    listener: TcpListener,
    app: Shared,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(app))
        .with_graceful_shutdown(shutdown)
        .await
}
