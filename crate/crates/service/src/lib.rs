//! HTTP/JSON facade over a loaded model.
//!
//! Routes: `POST /v1/analyze`, `POST /v1/recommend`, `GET /v1/health`.
//! Passwords only ever appear in request bodies and in the `password`
//! fields of recommendation buttons; they are never logged or persisted.

pub mod config;

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use axum::body::{Body, Bytes};
use axum::extract::{Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use dpar_core::api::{self, AnalyzeRequest, ErrorBody, RecommendError, RecommendRequest};
use dpar_core::model::ModelMeta;
use dpar_core::recommend::RNG_ALGORITHM;
use dpar_core::{load_model, Engine, L33tTable, RecommenderConfig, Variant};
use serde_json::json;
use tokio::net::TcpListener;

pub use config::{ConfigError, ServiceConfig, MODEL_PATH_ENV};

/// Shared, read-only request state. The engine is set once, after the
/// model finishes loading.
pub struct AppState {
    engine: OnceLock<Arc<Engine>>,
    recommender: RecommenderConfig,
    default_variant: Variant,
}

impl AppState {
    pub fn loading(recommender: RecommenderConfig, default_variant: Variant) -> Arc<Self> {
        Arc::new(Self { engine: OnceLock::new(), recommender, default_variant })
    }

    pub fn ready(engine: Engine, recommender: RecommenderConfig, default_variant: Variant) -> Arc<Self> {
        let state = Self::loading(recommender, default_variant);
        state.set_engine(engine);
        state
    }

    pub fn set_engine(&self, engine: Engine) {
        let _ = self.engine.set(Arc::new(engine));
    }

    pub fn engine(&self) -> Option<&Arc<Engine>> {
        self.engine.get()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/analyze", post(analyze))
        .route("/v1/recommend", post(recommend))
        .route("/v1/health", get(health))
        .layer(middleware::from_fn(access_log))
        .with_state(state)
}

/// Logs method, path, status and latency only.
async fn access_log(request: Request, next: Next) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_owned();
    let start = Instant::now();
    let response = next.run(request).await;
    tracing::info!(
        %method,
        %path,
        status = response.status().as_u16(),
        micros = start.elapsed().as_micros() as u64,
        "request"
    );
    response
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], Body::from(body)).into_response()
}

fn error_response(status: StatusCode, message: &str) -> Response {
    json_response(status, api::to_json(&ErrorBody { error: message.to_owned() }))
}

fn not_ready() -> Response {
    error_response(StatusCode::SERVICE_UNAVAILABLE, "model is loading")
}

/// Request bodies are parsed by hand so that serde error text (which can
/// quote the password) never reaches the client.
fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Option<T> {
    serde_json::from_slice(body).ok()
}

fn malformed() -> Response {
    error_response(StatusCode::BAD_REQUEST, "malformed JSON request body")
}

async fn analyze(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let Some(engine) = state.engine() else {
        return not_ready();
    };
    let Some(request) = parse_body::<AnalyzeRequest>(&body) else {
        return malformed();
    };
    match api::analyze(engine, &request.password, &state.recommender) {
        Ok(payload) => json_response(StatusCode::OK, api::to_json(&payload)),
        Err(violation) => json_response(StatusCode::UNPROCESSABLE_ENTITY, api::to_json(&violation)),
    }
}

async fn recommend(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let Some(engine) = state.engine().cloned() else {
        return not_ready();
    };
    let Some(request) = parse_body::<RecommendRequest>(&body) else {
        return malformed();
    };
    let variant = request.variant.unwrap_or(state.default_variant);
    let mut config = state.recommender.clone();
    config.seed = Some(request.seed.unwrap_or_else(|| config.resolve_seed()));

    let result =
        tokio::task::spawn_blocking(move || api::recommend(&engine, &request.password, variant, &config)).await;
    match result {
        Ok(Ok(payload)) => json_response(StatusCode::OK, api::to_json(&payload)),
        Ok(Err(RecommendError::Policy(violation))) => {
            json_response(StatusCode::UNPROCESSABLE_ENTITY, api::to_json(&violation))
        }
        Ok(Err(RecommendError::Internal(e))) => {
            tracing::error!(error = %e, "recommendation failed");
            error_response(StatusCode::INTERNAL_SERVER_ERROR, "internal error")
        }
        Err(_) => error_response(StatusCode::INTERNAL_SERVER_ERROR, "internal error"),
    }
}

fn health_body(meta: &ModelMeta) -> serde_json::Value {
    json!({
        "status": "ok",
        "model_meta": {
            "corpus_lines": meta.corpus_lines,
            "l33t_hash": meta.l33t_hash,
            "format_version": meta.format_version,
        },
        "rng": RNG_ALGORITHM,
    })
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    match state.engine() {
        Some(engine) => json_response(StatusCode::OK, health_body(engine.model().meta()).to_string()),
        None => json_response(StatusCode::SERVICE_UNAVAILABLE, json!({ "status": "loading" }).to_string()),
    }
}

/// Loads the model and l33t table named by `config`.
pub fn load_engine(config: &ServiceConfig) -> anyhow::Result<Engine> {
    let table = match &config.l33t_path {
        Some(path) => L33tTable::load(path)?,
        None => L33tTable::default(),
    };
    let model = load_model(&config.model_path)?;
    Ok(Engine::new(model, table)?)
}

/// Binds `listener`, answers 503 until the model is loaded, then serves
/// requests until `shutdown` resolves. A model that fails to load ends the
/// server with an error.
pub async fn serve_with_shutdown(
    listener: TcpListener,
    config: ServiceConfig,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> anyhow::Result<()> {
    let state = AppState::loading(config.recommender.clone(), config.default_variant);
    let app = router(state.clone());
    let server = tokio::spawn(async move { axum::serve(listener, app).with_graceful_shutdown(shutdown).await });

    let loader_config = config.clone();
    let loaded = tokio::task::spawn_blocking(move || load_engine(&loader_config)).await?;
    match loaded {
        Ok(engine) => {
            tracing::info!(corpus_lines = engine.model().meta().corpus_lines, "model loaded");
            state.set_engine(engine);
        }
        Err(e) => {
            server.abort();
            return Err(e.context(format!("loading model {}", config.model_path.display())));
        }
    }
    server.await??;
    Ok(())
}

pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let listener = TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    serve_with_shutdown(listener, config, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}
