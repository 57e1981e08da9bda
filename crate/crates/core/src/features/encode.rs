use serde::{Deserialize, Serialize};

use super::schema::FeatureSchema;
use super::{verb_bit, FeatureError};
use crate::ingest::LabeledRecord;

/// A binary sample laid out per a [`FeatureSchema`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<u8>);

impl FeatureVector {
    pub fn new(values: Vec<u8>) -> Result<Self, FeatureError> {
        if let Some(i) = values.iter().position(|&v| v > 1) {
            return Err(FeatureError::NonBinary {
                index: i,
                value: values[i],
            });
        }
        Ok(FeatureVector(values))
    }

    pub fn zeros(len: usize) -> Self {
        FeatureVector(vec![0; len])
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| f64::from(v)).collect()
    }
}

/// Encodes one record. Payload keys that the schema does not know are
/// ignored; their number is returned alongside the vector.
pub fn encode_record(
    rec: &LabeledRecord,
    schema: &FeatureSchema,
) -> Result<(FeatureVector, usize), FeatureError> {
    let verb = verb_bit(&rec.req_type).ok_or_else(|| FeatureError::UnsupportedVerb {
        verb: rec.req_type.clone(),
        record: 0,
        url: rec.url.clone(),
    })?;
    let mut values = vec![0u8; schema.len()];
    values[0] = verb;
    values[1] = u8::from(rec.is_json);
    let mut unseen = 0;
    for key in &rec.payload_keys {
        match schema.payload_index(key) {
            Some(i) => values[i] = 1,
            None => unseen += 1,
        }
    }
    Ok((FeatureVector(values), unseen))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeReport {
    pub records: usize,
    pub unseen_keys: usize,
}

/// Encoded feature matrix plus labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub x: Vec<FeatureVector>,
    pub y: Vec<u8>,
}

impl Dataset {
    pub fn new(
        schema: FeatureSchema,
        x: Vec<FeatureVector>,
        y: Vec<u8>,
    ) -> Result<Self, FeatureError> {
        if x.len() != y.len() {
            return Err(FeatureError::LengthMismatch {
                x: x.len(),
                y: y.len(),
            });
        }
        if let Some(v) = x.iter().find(|v| v.len() != schema.len()) {
            return Err(FeatureError::WidthMismatch {
                expected: schema.len(),
                found: v.len(),
            });
        }
        if let Some(&l) = y.iter().find(|&&l| l > 1) {
            return Err(FeatureError::NonBinary { index: 0, value: l });
        }
        Ok(Dataset { schema, x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn x_f64(&self) -> Vec<Vec<f64>> {
        self.x.iter().map(FeatureVector::to_f64).collect()
    }
}

/// Encodes every record against `schema`; labels come from `invasive`.
pub fn encode_dataset(
    records: &[LabeledRecord],
    schema: &FeatureSchema,
) -> Result<(Dataset, EncodeReport), FeatureError> {
    let mut report = EncodeReport::default();
    let mut x = Vec::with_capacity(records.len());
    let mut y = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let (v, unseen) = encode_record(r, schema).map_err(|e| match e {
            FeatureError::UnsupportedVerb { verb, url, .. } => FeatureError::UnsupportedVerb {
                verb,
                record: i,
                url,
            },
            e => e,
        })?;
        report.records += 1;
        report.unseen_keys += unseen;
        x.push(v);
        y.push(r.invasive);
    }
    Ok((Dataset::new(schema.clone(), x, y)?, report))
}
