//! Classify outbound HTTP requests as privacy-invasive or benign.
//!
//! The crate covers the offline half of the workflow:
//!
//! * [`ingest`] reads HAR captures and saved curl commands, profiles JSON
//!   payloads, applies the two-stage screen (suspicious payload *and*
//!   unrelated destination) and reads/writes the labeled dataset CSV and
//!   hosts-format blocklists.
//! * [`features`] cleans records, builds the binary feature schema
//!   (`GET/POST`, `is_json`, `pl_*`), encodes samples and splits them with
//!   a seeded, reproducible shuffle.
//! * [`classifiers`] holds logistic regression, a Gini decision tree and a
//!   linear SVM.
//! * [`evaluation`] computes confusion matrices and accuracy, precision,
//!   recall, specificity and F1.
//! * [`store`] persists models with their schema as canonical JSON.
//! * [`pipeline`] strings the above together for training and evaluation.

pub mod classifiers;
pub mod evaluation;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod store;
