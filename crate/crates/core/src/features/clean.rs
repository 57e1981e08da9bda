use std::collections::HashSet;

use crate::ingest::LabeledRecord;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanReport {
    pub duplicates_removed: usize,
    pub normalized: usize,
    pub rejected: usize,
}

/// Normalizes request types, rejects out-of-range labels and drops exact
/// duplicates (keeping the first occurrence). Normalization runs before the
/// duplicate check so the result is a fixed point.
pub fn clean_records(records: &[LabeledRecord]) -> (Vec<LabeledRecord>, CleanReport) {
    let mut report = CleanReport::default();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(records.len());

    for r in records {
        if r.invasive > 1 {
            report.rejected += 1;
            continue;
        }
        let verb = r.req_type.trim().to_ascii_uppercase();
        let mut r = r.clone();
        if verb != r.req_type {
            r.req_type = verb;
            report.normalized += 1;
        }
        if seen.insert(r.clone()) {
            out.push(r);
        } else {
            report.duplicates_removed += 1;
        }
    }
    (out, report)
}
