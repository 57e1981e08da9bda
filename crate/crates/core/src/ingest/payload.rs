use std::collections::BTreeSet;

use serde_json::Value;

use super::request::RawRequest;

/// Structure of a request body as far as the classifier cares: whether it
/// is JSON, and which top-level keys it carries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PayloadProfile {
    pub is_json: bool,
    pub top_level_keys: BTreeSet<String>,
}

/// A body counts as JSON when it is an object or an array whose elements
/// are all objects; an array contributes the union of its elements' keys.
/// Scalars, mixed arrays and non-UTF-8 bodies are non-JSON.
pub fn profile_payload(req: &RawRequest) -> PayloadProfile {
    req.body.as_deref().map(profile_body).unwrap_or_default()
}

pub fn profile_body(body: &[u8]) -> PayloadProfile {
    let Ok(value) = serde_json::from_slice::<Value>(body) else {
        return PayloadProfile::default();
    };
    match value {
        Value::Object(map) => PayloadProfile {
            is_json: true,
            top_level_keys: map.keys().cloned().collect(),
        },
        Value::Array(items) if items.iter().all(Value::is_object) => PayloadProfile {
            is_json: true,
            top_level_keys: items
                .iter()
                .filter_map(Value::as_object)
                .flat_map(|m| m.keys().cloned())
                .collect(),
        },
        _ => PayloadProfile::default(),
    }
}
