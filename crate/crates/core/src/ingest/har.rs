//! HAR 1.2 reader.
//!
//! Only the request half of each entry is used. Entries whose URL does not
//! parse as an absolute URL are skipped and counted rather than failing the
//! whole capture, since browser logs routinely contain `data:` and
//! `blob:` entries.

use serde_json::Value;

use super::request::{RawRequest, Source};
use super::IngestError;

/// Requests recovered from a HAR capture.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HarImport {
    pub requests: Vec<RawRequest>,
    pub skipped: usize,
}

pub fn parse_har(har_text: &str) -> Result<HarImport, IngestError> {
    let doc: Value = serde_json::from_str(har_text).map_err(|e| IngestError::Har {
        path: "$".into(),
        message: e.to_string(),
    })?;
    let entries = doc
        .get("log")
        .ok_or_else(|| missing("log"))?
        .get("entries")
        .ok_or_else(|| missing("log.entries"))?
        .as_array()
        .ok_or_else(|| IngestError::Har {
            path: "log.entries".into(),
            message: "expected an array".into(),
        })?;

    let mut out = HarImport::default();
    for (i, entry) in entries.iter().enumerate() {
        let base = format!("log.entries[{i}].request");
        let request = entry.get("request").ok_or_else(|| missing(&base))?;
        let method = string_at(request, "method", &base)?;
        let url = string_at(request, "url", &base)?;

        let post = request.get("postData");
        let body = post
            .and_then(|p| p.get("text"))
            .and_then(Value::as_str)
            .map(|t| t.as_bytes().to_vec());
        let content_type = post
            .and_then(|p| p.get("mimeType"))
            .and_then(Value::as_str)
            .filter(|m| !m.is_empty())
            .map(str::to_string)
            .or_else(|| header(request, "content-type"));

        match RawRequest::new(method, url, content_type, body, Source::Har) {
            Ok(req) => out.requests.push(req),
            Err(IngestError::InvalidUrl(_)) => out.skipped += 1,
            Err(e) => {
                return Err(IngestError::Har {
                    path: format!("{base}.method"),
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

fn missing(path: &str) -> IngestError {
    IngestError::Har {
        path: path.to_string(),
        message: "missing field".into(),
    }
}

fn string_at<'a>(obj: &'a Value, key: &str, base: &str) -> Result<&'a str, IngestError> {
    obj.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| IngestError::Har {
            path: format!("{base}.{key}"),
            message: "missing or not a string".into(),
        })
}

fn header(request: &Value, name: &str) -> Option<String> {
    request
        .get("headers")?
        .as_array()?
        .iter()
        .find(|h| {
            h.get("name")
                .and_then(Value::as_str)
                .is_some_and(|n| n.eq_ignore_ascii_case(name))
        })
        .and_then(|h| h.get("value"))
        .and_then(Value::as_str)
        .map(str::to_string)
}
