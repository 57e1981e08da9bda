use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::FeatureError;
use crate::ingest::{LabeledRecord, PAYLOAD_PREFIX};

/// Layout version of the feature schema document.
pub const SCHEMA_VERSION: u32 = 1;

/// Name of the one-hot request-type column. GET encodes as 0, POST as 1.
pub const VERB_FEATURE: &str = "GET/POST";
pub const IS_JSON_FEATURE: &str = "is_json";

/// Ordered binary feature layout: `GET/POST`, `is_json`, then the sorted
/// `pl_*` indicators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDoc")]
pub struct FeatureSchema {
    pub version: u32,
    pub feature_names: Vec<String>,
    pub schema_hash: String,
}

#[derive(Deserialize)]
struct SchemaDoc {
    version: u32,
    feature_names: Vec<String>,
    schema_hash: String,
}

impl TryFrom<SchemaDoc> for FeatureSchema {
    type Error = FeatureError;

    fn try_from(doc: SchemaDoc) -> Result<Self, Self::Error> {
        if doc.version != SCHEMA_VERSION {
            return Err(FeatureError::SchemaVersion(doc.version));
        }
        let schema = FeatureSchema::from_names(doc.feature_names)?;
        if schema.schema_hash != doc.schema_hash {
            return Err(FeatureError::SchemaHash {
                expected: schema.schema_hash,
                found: doc.schema_hash,
            });
        }
        Ok(schema)
    }
}

impl FeatureSchema {
    /// Builds a schema from payload keys (without the `pl_` prefix).
    pub fn from_payload_keys<'a>(keys: impl IntoIterator<Item = &'a str>) -> Self {
        let keys: BTreeSet<&str> = keys.into_iter().collect();
        let names = [VERB_FEATURE, IS_JSON_FEATURE]
            .into_iter()
            .map(str::to_string)
            .chain(keys.into_iter().map(|k| format!("{PAYLOAD_PREFIX}{k}")))
            .collect();
        Self::with_names(names)
    }

    /// Validates a full feature-name list.
    pub fn from_names(names: Vec<String>) -> Result<Self, FeatureError> {
        if names.len() < 2 || names[0] != VERB_FEATURE || names[1] != IS_JSON_FEATURE {
            return Err(FeatureError::InvalidSchema(format!(
                "feature list must begin with {VERB_FEATURE:?}, {IS_JSON_FEATURE:?}"
            )));
        }
        let payload = &names[2..];
        if let Some(bad) = payload
            .iter()
            .find(|n| n.strip_prefix(PAYLOAD_PREFIX).is_none_or(|k| k.is_empty()))
        {
            return Err(FeatureError::InvalidSchema(format!(
                "{bad:?} is not a pl_ feature"
            )));
        }
        if payload.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FeatureError::InvalidSchema(
                "pl_ features must be unique and sorted".into(),
            ));
        }
        Ok(Self::with_names(names))
    }

    fn with_names(feature_names: Vec<String>) -> Self {
        let schema_hash = hash_names(&feature_names);
        FeatureSchema {
            version: SCHEMA_VERSION,
            feature_names,
            schema_hash,
        }
    }

    pub fn len(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.feature_names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        if name == VERB_FEATURE {
            return Some(0);
        }
        if name == IS_JSON_FEATURE {
            return Some(1);
        }
        self.feature_names[2..]
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| i + 2)
    }

    /// Index of the indicator for payload key `key`.
    pub fn payload_index(&self, key: &str) -> Option<usize> {
        self.index_of(&format!("{PAYLOAD_PREFIX}{key}"))
            .filter(|&i| i >= 2)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FeatureError> {
        serde_json::from_str(text).map_err(|e| FeatureError::InvalidSchema(e.to_string()))
    }
}

fn hash_names(names: &[String]) -> String {
    let mut h = Sha256::new();
    for n in names {
        h.update(n.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

pub fn build_schema(records: &[LabeledRecord]) -> Result<FeatureSchema, FeatureError> {
    for (i, r) in records.iter().enumerate() {
        super::verb_bit(&r.req_type).ok_or_else(|| FeatureError::UnsupportedVerb {
            verb: r.req_type.clone(),
            record: i,
            url: r.url.clone(),
        })?;
    }
    Ok(FeatureSchema::from_payload_keys(
        records
            .iter()
            .flat_map(|r| r.payload_keys.iter().map(String::as_str)),
    ))
}
