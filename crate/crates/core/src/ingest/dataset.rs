//! The labeled-dataset CSV.
//!
//! Header: `invasive,url,req_type,is_json,pl_<key>...`, with the `pl_`
//! columns being the sorted union of every record's payload keys. A record
//! has `1` in `pl_<key>` iff it sent `<key>`. `url` holds the destination
//! host only.
//!
//! The review variant of the file, written by ingest and consumed by
//! labeling, uses the same layout but allows `?` in the `invasive` column
//! for rows that still need a human decision.

use std::collections::BTreeSet;

use super::IngestError;

pub const FIXED_COLUMNS: [&str; 4] = ["invasive", "url", "req_type", "is_json"];
pub const PAYLOAD_PREFIX: &str = "pl_";
pub const PENDING_MARK: &str = "?";

/// One spreadsheet row. `invasive` is kept as a raw integer so that
/// out-of-range labels survive parsing and can be reported by cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledRecord {
    pub invasive: u8,
    pub url: String,
    pub req_type: String,
    pub is_json: bool,
    pub payload_keys: BTreeSet<String>,
}

/// A row of the review file: a record whose label may still be pending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewRow {
    pub label: Option<u8>,
    pub record: LabeledRecord,
}

pub fn export_dataset_csv(records: &[LabeledRecord]) -> Result<String, IngestError> {
    if records.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    write_rows(records.iter().map(|r| (r.invasive.to_string(), r)))
}

pub fn export_review_csv(rows: &[ReviewRow]) -> Result<String, IngestError> {
    if rows.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    write_rows(rows.iter().map(|row| {
        let label = row
            .label
            .map(|l| l.to_string())
            .unwrap_or_else(|| PENDING_MARK.to_string());
        (label, &row.record)
    }))
}

/// Parses a fully labeled dataset; a pending `?` label is an error.
pub fn parse_dataset_csv(text: &str) -> Result<Vec<LabeledRecord>, IngestError> {
    parse_review_csv(text)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| match row.label {
            Some(invasive) => Ok(LabeledRecord {
                invasive,
                ..row.record
            }),
            None => Err(IngestError::Csv {
                row: i + 2,
                message: "label still pending review".into(),
            }),
        })
        .collect()
}

pub fn parse_review_csv(text: &str) -> Result<Vec<ReviewRow>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv {
            row: 1,
            message: e.to_string(),
        })?
        .clone();

    let names: Vec<&str> = headers.iter().collect();
    if names.len() < FIXED_COLUMNS.len() || names[..4] != FIXED_COLUMNS {
        return Err(IngestError::Csv {
            row: 1,
            message: format!("header must start with {}", FIXED_COLUMNS.join(",")),
        });
    }
    let keys = names[4..]
        .iter()
        .map(|n| {
            n.strip_prefix(PAYLOAD_PREFIX)
                .filter(|k| !k.is_empty())
                .map(str::to_string)
                .ok_or_else(|| IngestError::Csv {
                    row: 1,
                    message: format!("column {n:?} is not a pl_ column"),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let bad = |message: String| IngestError::Csv { row, message };
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != names.len() {
            return Err(bad(format!(
                "expected {} fields, got {}",
                names.len(),
                rec.len()
            )));
        }
        let label = match &rec[0] {
            PENDING_MARK => None,
            s => Some(
                s.parse::<u8>()
                    .map_err(|_| bad(format!("invasive {s:?} is not an integer label")))?,
            ),
        };
        let url = rec[1].to_string();
        if url.is_empty() {
            return Err(bad("empty url".into()));
        }
        let is_json = binary_cell(&rec[3]).ok_or_else(|| bad(format!("is_json {:?}", &rec[3])))?;
        let mut payload_keys = BTreeSet::new();
        for (key, cell) in keys.iter().zip(rec.iter().skip(4)) {
            match binary_cell(cell) {
                Some(true) => {
                    payload_keys.insert(key.clone());
                }
                Some(false) => {}
                None => return Err(bad(format!("{PAYLOAD_PREFIX}{key} = {cell:?}"))),
            }
        }
        rows.push(ReviewRow {
            label,
            record: LabeledRecord {
                invasive: label.unwrap_or(0),
                url,
                req_type: rec[2].to_string(),
                is_json,
                payload_keys,
            },
        });
    }
    Ok(rows)
}

fn binary_cell(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

fn write_rows<'a>(
    rows: impl Iterator<Item = (String, &'a LabeledRecord)> + Clone,
) -> Result<String, IngestError> {
    let keys: BTreeSet<&str> = rows
        .clone()
        .flat_map(|(_, r)| r.payload_keys.iter().map(String::as_str))
        .collect();
    let io = |e: csv::Error| IngestError::Csv {
        row: 0,
        message: e.to_string(),
    };

    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    let header: Vec<String> = FIXED_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(keys.iter().map(|k| format!("{PAYLOAD_PREFIX}{k}")))
        .collect();
    w.write_record(&header).map_err(io)?;
    for (label, r) in rows {
        let mut fields = vec![
            label,
            r.url.clone(),
            r.req_type.clone(),
            u8::from(r.is_json).to_string(),
        ];
        fields.extend(
            keys.iter()
                .map(|k| u8::from(r.payload_keys.contains(*k)).to_string()),
        );
        w.write_record(&fields).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| IngestError::Csv {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
