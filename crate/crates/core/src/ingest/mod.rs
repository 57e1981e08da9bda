//! Capture ingest: HAR and curl-file parsing, payload profiling, two-stage
//! screening, the labeled-dataset CSV and hosts-format blocklists.

mod blocklist;
mod curl;
mod dataset;
mod har;
mod payload;
mod request;
mod screen;

use thiserror::Error;

pub use blocklist::{emit_blocklist, Blocklist};
pub use curl::parse_curl_file;
pub use dataset::{
    export_dataset_csv, export_review_csv, parse_dataset_csv, parse_review_csv, LabeledRecord,
    ReviewRow, FIXED_COLUMNS, PAYLOAD_PREFIX, PENDING_MARK,
};
pub use har::{parse_har, HarImport};
pub use payload::{profile_body, profile_payload, PayloadProfile};
pub use request::{host_of, RawRequest, Source};
pub use screen::{
    is_same_or_subdomain, screen_request, Label, ScreenConfig, ScreenVerdict, DEFAULT_SUSPECT_KEYS,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("HAR parse error at {path}: {message}")]
    Har { path: String, message: String },
    #[error("curl file line {line}: {message}")]
    Curl { line: usize, message: String },
    #[error("dataset CSV row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("invalid URL {0:?}")]
    InvalidUrl(String),
    #[error("invalid HTTP method {0:?}")]
    InvalidMethod(String),
    #[error("site domain must not be empty")]
    EmptySiteDomain,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid sink address {0:?}: expected IPv4")]
    InvalidSink(String),
}

/// Turns a screened request into a review row. Only payload keys that were
/// actually observed are carried over, and the label is filled in only when
/// the screen reached a definite verdict.
pub fn review_row(
    req: &RawRequest,
    profile: &PayloadProfile,
    verdict: &ScreenVerdict,
) -> ReviewRow {
    let label = match verdict.recommended_label {
        Label::Invasive => Some(1),
        Label::Benign => Some(0),
        Label::NeedsReview => None,
    };
    ReviewRow {
        label,
        record: LabeledRecord {
            invasive: label.unwrap_or(0),
            url: req.host.clone(),
            req_type: req.method.clone(),
            is_json: profile.is_json,
            payload_keys: profile.top_level_keys.clone(),
        },
    }
}
