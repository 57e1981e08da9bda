//! Self-describing model bundles (`*.pgmodel.json`).
//!
//! A bundle pairs trained parameters with the feature schema they were
//! trained against. It is written as canonical JSON: object keys sorted,
//! no insignificant whitespace, and every float printed in scientific
//! notation with 17 significant digits, so that equal bundles encode to
//! identical bytes and every float survives the round trip exactly.

use std::fmt::Write as _;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classifiers::{
    DTModel, DtHyper, LRModel, LrHyper, Model, ModelKind, Node, SVMModel, SvmHyper,
};
use crate::features::{FeatureSchema, FeatureVector, SplitDataset};

pub const FORMAT_VERSION: u64 = 1;
pub const BUNDLE_EXTENSION: &str = ".pgmodel.json";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("malformed bundle: {0}")]
    Malformed(String),
    #[error("unknown bundle format version {0}")]
    UnknownVersion(u64),
    #[error("schema hash mismatch: schema has {schema}, model payload has {payload}")]
    HashMismatch { schema: String, payload: String },
    #[error("invalid bundle: {0}")]
    Invalid(String),
}

/// How the training split was drawn, so evaluation can rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub ratio: f64,
    pub seed: u64,
    pub stratified: bool,
    pub generator: String,
    pub train_size: usize,
    pub test_size: usize,
}

impl From<&SplitDataset> for SplitInfo {
    fn from(s: &SplitDataset) -> Self {
        SplitInfo {
            ratio: s.ratio,
            seed: s.seed,
            stratified: s.stratified,
            generator: s.generator.to_string(),
            train_size: s.y_train.len(),
            test_size: s.y_test.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub format_version: u64,
    pub schema: FeatureSchema,
    pub model: Model,
    /// Hash of the schema the parameters were fitted against.
    pub model_schema_hash: String,
    pub created_at: DateTime<Utc>,
    pub training_fingerprint: String,
    pub split: Option<SplitInfo>,
}

impl ModelBundle {
    pub fn new(
        schema: FeatureSchema,
        model: Model,
        created_at: DateTime<Utc>,
        training_fingerprint: String,
    ) -> Self {
        ModelBundle {
            format_version: FORMAT_VERSION,
            model_schema_hash: schema.schema_hash.clone(),
            schema,
            model,
            created_at,
            training_fingerprint,
            split: None,
        }
    }

    pub fn with_split(mut self, split: SplitInfo) -> Self {
        self.split = Some(split);
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }

    pub fn predict(&self, v: &FeatureVector) -> Result<u8, crate::classifiers::ClassifierError> {
        self.model.predict(&v.to_f64())
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        if self.format_version != FORMAT_VERSION {
            return Err(StoreError::UnknownVersion(self.format_version));
        }
        if self.model_schema_hash != self.schema.schema_hash {
            return Err(StoreError::HashMismatch {
                schema: self.schema.schema_hash.clone(),
                payload: self.model_schema_hash.clone(),
            });
        }
        if self.model.width() != self.schema.len() {
            return Err(StoreError::Invalid(format!(
                "model expects {} features, schema has {}",
                self.model.width(),
                self.schema.len()
            )));
        }
        self.model
            .validate()
            .map_err(|e| StoreError::Invalid(e.to_string()))
    }
}

/// SHA-256 over the encoded training rows and their labels.
pub fn training_fingerprint(x: &[FeatureVector], y: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update((x.len() as u64).to_le_bytes());
    for (v, &label) in x.iter().zip(y) {
        h.update((v.len() as u64).to_le_bytes());
        h.update(v.values());
        h.update([label]);
    }
    hex::encode(h.finalize())
}

#[derive(Serialize, Deserialize)]
struct LinearPayload {
    schema_hash: String,
    weights: Vec<f64>,
    bias: f64,
}

#[derive(Serialize, Deserialize)]
struct TreePayload {
    schema_hash: String,
    n_features: usize,
    root: Node,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    format_version: u64,
    model_kind: ModelKind,
    schema: Value,
    model_payload: Value,
    hyper: Value,
    created_at: String,
    training_fingerprint: String,
    #[serde(default)]
    split: Option<SplitInfo>,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("bundle parts serialize to JSON")
}

pub fn save_bundle(b: &ModelBundle) -> Result<Vec<u8>, StoreError> {
    b.validate()?;
    let schema_hash = b.model_schema_hash.clone();
    let (model_payload, hyper) = match &b.model {
        Model::Lr(m) => (
            to_value(&LinearPayload {
                schema_hash,
                weights: m.weights.clone(),
                bias: m.bias,
            }),
            to_value(&m.hyper),
        ),
        Model::Svm(m) => (
            to_value(&LinearPayload {
                schema_hash,
                weights: m.weights.clone(),
                bias: m.bias,
            }),
            to_value(&m.hyper),
        ),
        Model::Dt(m) => (
            to_value(&TreePayload {
                schema_hash,
                n_features: m.n_features,
                root: m.root.clone(),
            }),
            to_value(&m.hyper),
        ),
    };
    let wire = Wire {
        format_version: b.format_version,
        model_kind: b.kind(),
        schema: to_value(&b.schema),
        model_payload,
        hyper,
        created_at: b.created_at.to_rfc3339_opts(SecondsFormat::Secs, true),
        training_fingerprint: b.training_fingerprint.clone(),
        split: b.split.clone(),
    };
    let mut out = String::new();
    write_canonical(&to_value(&wire), &mut out)?;
    Ok(out.into_bytes())
}

pub fn load_bundle(bytes: &[u8]) -> Result<ModelBundle, StoreError> {
    let malformed = |e: serde_json::Error| StoreError::Malformed(e.to_string());
    let doc: Value = serde_json::from_slice(bytes).map_err(malformed)?;
    let version = doc
        .get("format_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| StoreError::Malformed("missing format_version".into()))?;
    if version != FORMAT_VERSION {
        return Err(StoreError::UnknownVersion(version));
    }
    let wire: Wire = serde_json::from_value(doc).map_err(malformed)?;

    let schema: FeatureSchema = serde_json::from_value(wire.schema).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("hash mismatch") {
            StoreError::HashMismatch {
                schema: "recomputed from feature_names".into(),
                payload: msg,
            }
        } else {
            StoreError::Malformed(msg)
        }
    })?;
    let shape = |e: serde_json::Error| {
        StoreError::Invalid(format!(
            "{} payload does not match its kind: {e}",
            wire.model_kind
        ))
    };
    let (model, payload_hash) = match wire.model_kind {
        ModelKind::Lr => {
            let p: LinearPayload = serde_json::from_value(wire.model_payload).map_err(shape)?;
            let hyper: LrHyper = serde_json::from_value(wire.hyper).map_err(shape)?;
            let m = LRModel {
                weights: p.weights,
                bias: p.bias,
                hyper,
            };
            (Model::Lr(m), p.schema_hash)
        }
        ModelKind::Svm => {
            let p: LinearPayload = serde_json::from_value(wire.model_payload).map_err(shape)?;
            let hyper: SvmHyper = serde_json::from_value(wire.hyper).map_err(shape)?;
            let m = SVMModel {
                weights: p.weights,
                bias: p.bias,
                hyper,
            };
            (Model::Svm(m), p.schema_hash)
        }
        ModelKind::Dt => {
            let p: TreePayload = serde_json::from_value(wire.model_payload).map_err(shape)?;
            let hyper: DtHyper = serde_json::from_value(wire.hyper).map_err(shape)?;
            let m = DTModel {
                root: p.root,
                n_features: p.n_features,
                hyper,
            };
            (Model::Dt(m), p.schema_hash)
        }
    };
    let created_at = DateTime::parse_from_rfc3339(&wire.created_at)
        .map_err(|e| StoreError::Malformed(format!("created_at: {e}")))?
        .with_timezone(&Utc);

    let bundle = ModelBundle {
        format_version: wire.format_version,
        schema,
        model,
        model_schema_hash: payload_hash,
        created_at,
        training_fingerprint: wire.training_fingerprint,
        split: wire.split,
    };
    bundle.validate()?;
    Ok(bundle)
}

fn write_canonical(v: &Value, out: &mut String) -> Result<(), StoreError> {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                write!(out, "{i}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let f = n.as_f64().unwrap_or(f64::NAN);
                if !f.is_finite() {
                    return Err(StoreError::Invalid("non-finite number".into()));
                }
                write!(out, "{f:.16e}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out)?;
            }
            out.push(']');
        }
        Value::Object(map) => write_object(map, out)?,
    }
    Ok(())
}

fn write_object(map: &Map<String, Value>, out: &mut String) -> Result<(), StoreError> {
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    out.push('{');
    for (i, k) in keys.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&serde_json::to_string(k).expect("string encodes"));
        out.push(':');
        write_canonical(&map[k], out)?;
    }
    out.push('}');
    Ok(())
}
