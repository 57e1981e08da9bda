use std::fmt;

use serde::{Deserialize, Serialize};
use url::Url;

use super::IngestError;

/// Where a captured request came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Har,
    CurlFile,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Har => f.write_str("har"),
            Source::CurlFile => f.write_str("curl-file"),
        }
    }
}

/// One captured outbound HTTP request, before any labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRequest {
    pub method: String,
    pub url: String,
    pub host: String,
    pub content_type: Option<String>,
    pub body: Option<Vec<u8>>,
    pub source: Source,
}

impl RawRequest {
    /// Builds a request, checking that `url` is absolute with a host and
    /// normalizing `method` to an uppercase token.
    pub fn new(
        method: &str,
        url: &str,
        content_type: Option<String>,
        body: Option<Vec<u8>>,
        source: Source,
    ) -> Result<Self, IngestError> {
        let method = method.trim().to_ascii_uppercase();
        if method.is_empty() || !method.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Err(IngestError::InvalidMethod(method));
        }
        let host = host_of(url)?;
        Ok(RawRequest {
            method,
            url: url.to_string(),
            host,
            content_type,
            body,
            source,
        })
    }
}

/// Lowercased host of an absolute URL.
pub fn host_of(url: &str) -> Result<String, IngestError> {
    let parsed = Url::parse(url).map_err(|_| IngestError::InvalidUrl(url.to_string()))?;
    match parsed.host_str() {
        Some(h) if !h.is_empty() => Ok(h.trim_end_matches('.').to_ascii_lowercase()),
        _ => Err(IngestError::InvalidUrl(url.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn host_is_lowercased_and_port_dropped() {
        let r = RawRequest::new(
            "post",
            "https://Ads.Example:8443/x?y=1",
            None,
            None,
            Source::Har,
        )
        .unwrap();
        assert_eq!(r.method, "POST");
        assert_eq!(r.host, "ads.example");
    }

    #[test]
    fn rejects_relative_and_hostless_urls() {
        assert!(RawRequest::new("GET", "not a url", None, None, Source::Har).is_err());
        assert!(RawRequest::new("GET", "/relative/path", None, None, Source::Har).is_err());
        assert!(RawRequest::new("GET", "data:text/plain,hi", None, None, Source::Har).is_err());
    }

    #[test]
    fn rejects_empty_method() {
        assert!(matches!(
            RawRequest::new("  ", "https://a.example/", None, None, Source::Har),
            Err(IngestError::InvalidMethod(_))
        ));
    }
}
