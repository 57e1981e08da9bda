//! Record cleaning, the binary feature schema, encoding and the seeded
//! train/test split.

mod clean;
mod encode;
mod schema;
mod split;

use thiserror::Error;

pub use clean::{clean_records, CleanReport};
pub use encode::{encode_dataset, encode_record, Dataset, EncodeReport, FeatureVector};
pub use schema::{build_schema, FeatureSchema, IS_JSON_FEATURE, SCHEMA_VERSION, VERB_FEATURE};
pub use split::{
    permutation, split_dataset, train_count, SplitDataset, SplitOptions, SPLIT_GENERATOR,
};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("record {record} ({url}): unsupported request type {verb:?}, expected GET or POST")]
    UnsupportedVerb {
        verb: String,
        record: usize,
        url: String,
    },
    #[error("invalid feature schema: {0}")]
    InvalidSchema(String),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("schema hash mismatch: computed {expected}, document has {found}")]
    SchemaHash { expected: String, found: String },
    #[error("value {value} at position {index} is not binary")]
    NonBinary { index: usize, value: u8 },
    #[error("{x} feature vectors but {y} labels")]
    LengthMismatch { x: usize, y: usize },
    #[error("vector has {found} features, schema has {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("split ratio {0} outside (0, 1)")]
    InvalidRatio(f64),
    #[error("degenerate split: {train} train / {test} test")]
    DegenerateSplit { train: usize, test: usize },
}

/// GET encodes as 0, POST as 1.
pub(crate) fn verb_bit(verb: &str) -> Option<u8> {
    match verb {
        "GET" => Some(0),
        "POST" => Some(1),
        _ => None,
    }
}
