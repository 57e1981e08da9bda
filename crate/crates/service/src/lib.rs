//! Strict prediction endpoints over loaded model bundles.
//!
//! `POST /api/predict/{lr,dt,svm}` takes a JSON object holding every schema
//! feature exactly once, each as integer 0 or 1, and answers with
//! `{"prediction", "model_kind", "schema_version"}`. Bundles are loaded once
//! at startup and shared read-only between requests.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use trackwall::classifiers::ModelKind;
use trackwall::features::{FeatureSchema, FeatureVector};
use trackwall::store::{load_bundle, ModelBundle, StoreError};

pub const ENV_LR_BUNDLE: &str = "PREDICT_LR_BUNDLE";
pub const ENV_DT_BUNDLE: &str = "PREDICT_DT_BUNDLE";
pub const ENV_SVM_BUNDLE: &str = "PREDICT_SVM_BUNDLE";
pub const ENV_BIND: &str = "PREDICT_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

/// A DTO rejection. Each entry in `fields` has the matching reason at the
/// same position in `reasons`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationError {
    pub fields: Vec<String>,
    pub reasons: Vec<String>,
}

impl ValidationError {
    fn push(&mut self, field: &str, reason: &str) {
        self.fields.push(field.to_string());
        self.reasons.push(reason.to_string());
    }
}

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .fields
            .iter()
            .zip(&self.reasons)
            .map(|(field, reason)| format!("{field}: {reason}"))
            .collect();
        write!(f, "invalid DTO ({})", parts.join(", "))
    }
}

impl std::error::Error for ValidationError {}

/// Accepts `body` iff its keys are exactly the schema's feature names and
/// every value is the integer 0 or 1. All problems are reported at once:
/// missing fields in schema order, then unknown fields sorted, then
/// non-binary values in schema order.
pub fn validate_dto(
    body: &Value,
    schema: &FeatureSchema,
) -> Result<FeatureVector, ValidationError> {
    let mut err = ValidationError::default();
    let Some(obj) = body.as_object() else {
        err.push("$", "body must be a JSON object");
        return Err(err);
    };
    let mut values = Vec::with_capacity(schema.len());
    let mut non_binary = Vec::new();
    for name in &schema.feature_names {
        match obj.get(name) {
            None => err.push(name, "missing"),
            Some(v) => match v.as_u64() {
                Some(b @ (0 | 1)) => values.push(b as u8),
                _ => non_binary.push(name.as_str()),
            },
        }
    }
    let mut unknown: Vec<&str> = obj
        .keys()
        .map(String::as_str)
        .filter(|k| schema.index_of(k).is_none())
        .collect();
    unknown.sort_unstable();
    for k in unknown {
        err.push(k, "unknown field");
    }
    for k in non_binary {
        err.push(k, "value must be 0 or 1");
    }
    if !err.fields.is_empty() {
        return Err(err);
    }
    Ok(FeatureVector::new(values).expect("values checked binary"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionResponse {
    pub prediction: u8,
    pub model_kind: ModelKind,
    pub schema_version: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("no {0} model loaded")]
    ModelUnavailable(ModelKind),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("prediction failed: {0}")]
    Internal(String),
}

impl IntoResponse for PredictError {
    fn into_response(self) -> Response {
        let (status, body) = match &self {
            PredictError::ModelUnavailable(kind) => (
                StatusCode::SERVICE_UNAVAILABLE,
                serde_json::json!({"error": "model_unavailable", "model": kind}),
            ),
            PredictError::Validation(v) => (
                StatusCode::BAD_REQUEST,
                serde_json::json!({"error": "validation", "fields": v.fields, "reasons": v.reasons}),
            ),
            PredictError::Internal(msg) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                serde_json::json!({"error": "internal", "reasons": [msg]}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

/// Loaded bundles, one per route at most. Never mutated after startup.
#[derive(Debug, Clone, Default)]
pub struct AppState {
    models: BTreeMap<ModelKind, Arc<ModelBundle>>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Serves `bundle` under the route of its own model kind.
    pub fn with_bundle(mut self, bundle: ModelBundle) -> Self {
        self.models.insert(bundle.kind(), Arc::new(bundle));
        self
    }

    pub fn bundle(&self, kind: ModelKind) -> Option<&ModelBundle> {
        self.models.get(&kind).map(Arc::as_ref)
    }

    pub fn kinds(&self) -> Vec<ModelKind> {
        self.models.keys().copied().collect()
    }
}

pub fn handle_predict(
    state: &AppState,
    kind: ModelKind,
    body: &Value,
) -> Result<PredictionResponse, PredictError> {
    let bundle = state
        .bundle(kind)
        .ok_or(PredictError::ModelUnavailable(kind))?;
    let v = validate_dto(body, &bundle.schema)?;
    let prediction = bundle
        .predict(&v)
        .map_err(|e| PredictError::Internal(e.to_string()))?;
    Ok(PredictionResponse {
        prediction,
        model_kind: kind,
        schema_version: bundle.schema.version,
    })
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/predict/{kind}", post(predict_route))
        .route("/api/health", get(health))
        .with_state(Arc::new(state))
}

async fn predict_route(
    State(state): State<Arc<AppState>>,
    Path(kind): Path<String>,
    body: Bytes,
) -> Response {
    let Ok(kind) = kind.parse::<ModelKind>() else {
        return (
            StatusCode::NOT_FOUND,
            Json(serde_json::json!({"error": "unknown_route", "model": kind})),
        )
            .into_response();
    };
    let body: Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => {
            let err = ValidationError {
                fields: vec!["$".into()],
                reasons: vec![format!("body is not valid JSON: {e}")],
            };
            return PredictError::Validation(err).into_response();
        }
    };
    match handle_predict(&state, kind, &body) {
        Ok(resp) => Json(resp).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn health(State(state): State<Arc<AppState>>) -> Json<Value> {
    Json(serde_json::json!({"status": "ok", "models": state.kinds()}))
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid bind address {0:?}")]
    Bind(String),
    #[error("cannot read bundle {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bundle {path}: {source}")]
    Bundle { path: PathBuf, source: StoreError },
    #[error("bundle {path} holds a {found} model, expected {expected}")]
    KindMismatch {
        path: PathBuf,
        expected: ModelKind,
        found: ModelKind,
    },
    #[error("no model bundles configured")]
    NoModels,
}

/// Where to listen and which bundle file backs each route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub bundles: BTreeMap<ModelKind, PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: DEFAULT_BIND.parse().expect("default bind address"),
            bundles: BTreeMap::new(),
        }
    }
}

impl ServiceConfig {
    /// Reads `PREDICT_{LR,DT,SVM}_BUNDLE` and `PREDICT_BIND` through `get`.
    pub fn from_env_with(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut cfg = ServiceConfig::default();
        if let Some(bind) = get(ENV_BIND) {
            cfg.bind = bind.parse().map_err(|_| ConfigError::Bind(bind))?;
        }
        for (kind, var) in [
            (ModelKind::Lr, ENV_LR_BUNDLE),
            (ModelKind::Dt, ENV_DT_BUNDLE),
            (ModelKind::Svm, ENV_SVM_BUNDLE),
        ] {
            if let Some(path) = get(var).filter(|p| !p.is_empty()) {
                cfg.bundles.insert(kind, PathBuf::from(path));
            }
        }
        Ok(cfg)
    }

    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_env_with(|k| std::env::var(k).ok())
    }

    /// Loads every configured bundle, checking each sits under its own route.
    pub fn load(&self) -> Result<AppState, ConfigError> {
        if self.bundles.is_empty() {
            return Err(ConfigError::NoModels);
        }
        let mut state = AppState::new();
        for (&kind, path) in &self.bundles {
            let bytes = std::fs::read(path).map_err(|source| ConfigError::Read {
                path: path.clone(),
                source,
            })?;
            let bundle = load_bundle(&bytes).map_err(|source| ConfigError::Bundle {
                path: path.clone(),
                source,
            })?;
            if bundle.kind() != kind {
                return Err(ConfigError::KindMismatch {
                    path: path.clone(),
                    expected: kind,
                    found: bundle.kind(),
                });
            }
            state = state.with_bundle(bundle);
        }
        Ok(state)
    }
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, models = ?state.kinds(), "serving predictions");
    }
    axum::serve(listener, router(state)).await
}
