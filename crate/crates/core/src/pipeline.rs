//! End-to-end training and held-out evaluation over labeled records.

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::classifiers::{ClassifierError, Hyper, Model};
use crate::evaluation::{confusion_matrix, ConfusionMatrix, EvalError};
use crate::features::{
    build_schema, clean_records, encode_dataset, split_dataset, CleanReport, Dataset, EncodeReport,
    FeatureError, SplitDataset, SplitOptions,
};
use crate::ingest::LabeledRecord;
use crate::store::{training_fingerprint, ModelBundle, SplitInfo, StoreError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("no usable records after cleaning")]
    NoRecords,
    #[error("bundle has no split information; cannot rebuild its held-out set")]
    NoSplitInfo,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub bundle: ModelBundle,
    pub clean: CleanReport,
    pub split: SplitDataset,
}

/// clean -> schema -> encode -> split -> fit.
pub fn train(
    records: &[LabeledRecord],
    hyper: Hyper,
    split: SplitOptions,
    created_at: DateTime<Utc>,
) -> Result<TrainOutcome, PipelineError> {
    let (cleaned, clean) = clean_records(records);
    if cleaned.is_empty() {
        return Err(PipelineError::NoRecords);
    }
    let schema = build_schema(&cleaned)?;
    let (ds, _) = encode_dataset(&cleaned, &schema)?;
    let parts = split_dataset(&ds, split)?;
    let x: Vec<Vec<f64>> = parts.x_train.iter().map(|v| v.to_f64()).collect();
    let model = Model::fit(&x, &parts.y_train, hyper)?;
    let bundle = ModelBundle::new(
        schema,
        model,
        created_at,
        training_fingerprint(&parts.x_train, &parts.y_train),
    )
    .with_split(SplitInfo::from(&parts));
    bundle.validate()?;
    Ok(TrainOutcome {
        bundle,
        clean,
        split: parts,
    })
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub matrix: ConfusionMatrix,
    /// The records reproduce the bundle's own training split, so only the
    /// held-out part was scored.
    pub matched_training_data: bool,
    pub evaluated: usize,
    pub encode: EncodeReport,
    pub clean: CleanReport,
}

/// Scores `bundle` on `records`. If the records rebuild the exact training
/// split recorded in the bundle (same fingerprint), only the held-out rows
/// are scored; otherwise every row counts as unseen data.
pub fn evaluate(
    bundle: &ModelBundle,
    records: &[LabeledRecord],
) -> Result<Evaluation, PipelineError> {
    let (cleaned, clean) = clean_records(records);
    if cleaned.is_empty() {
        return Err(PipelineError::NoRecords);
    }
    let (ds, encode) = encode_dataset(&cleaned, &bundle.schema)?;

    let held_out = match &bundle.split {
        Some(info) => {
            let opts = SplitOptions {
                ratio: info.ratio,
                seed: info.seed,
                stratified: info.stratified,
            };
            split_dataset(&ds, opts).ok().filter(|s| {
                training_fingerprint(&s.x_train, &s.y_train) == bundle.training_fingerprint
            })
        }
        None => None,
    };
    let matched = held_out.is_some();
    let (x, y) = match held_out {
        Some(s) => (s.x_test, s.y_test),
        None => (ds.x, ds.y),
    };
    let preds = x
        .iter()
        .map(|v| bundle.predict(v))
        .collect::<Result<Vec<u8>, _>>()?;
    Ok(Evaluation {
        matrix: confusion_matrix(&y, &preds)?,
        matched_training_data: matched,
        evaluated: y.len(),
        encode,
        clean,
    })
}

/// Cleans and encodes records against a freshly built schema.
pub fn prepare(records: &[LabeledRecord]) -> Result<(Dataset, CleanReport), PipelineError> {
    let (cleaned, report) = clean_records(records);
    if cleaned.is_empty() {
        return Err(PipelineError::NoRecords);
    }
    let schema = build_schema(&cleaned)?;
    let (ds, _) = encode_dataset(&cleaned, &schema)?;
    Ok((ds, report))
}
