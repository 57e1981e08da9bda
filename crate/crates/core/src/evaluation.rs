//! Confusion matrix and the derived scores. The positive class is
//! invasive (`1`). A score whose denominator is zero is reported as
//! undefined (`None`, serialized as `null`) rather than 0 or 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no samples to evaluate")]
    Empty,
    #[error("{truth} true labels but {pred} predictions")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("label {0} is not 0 or 1")]
    BadLabel(u8),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, tn: usize, fp: usize, fn_: usize) -> Self {
        ConfusionMatrix { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.tn + self.fp
    }

    /// The same predictions scored with class 0 as the positive class.
    pub fn transposed(&self) -> Self {
        ConfusionMatrix {
            tp: self.tn,
            tn: self.tp,
            fp: self.fn_,
            fn_: self.fp,
        }
    }
}

pub fn confusion_matrix(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            truth: y_true.len(),
            pred: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => cm.tp += 1,
            (0, 0) => cm.tn += 1,
            (0, 1) => cm.fp += 1,
            (1, 0) => cm.fn_ += 1,
            (t, p) => return Err(EvalError::BadLabel(if t > 1 { t } else { p })),
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<Metrics, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::Empty);
    }
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(Metrics {
        accuracy: ratio(cm.tp + cm.tn, total),
        precision,
        recall,
        specificity: ratio(cm.tn, cm.tn + cm.fp),
        f1,
    })
}

/// Evaluation output as written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model: String,
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    pub f1: Option<f64>,
}

impl EvaluationReport {
    pub fn new(model: impl Into<String>, cm: &ConfusionMatrix) -> Result<Self, EvalError> {
        let m = compute_metrics(cm)?;
        Ok(EvaluationReport {
            model: model.into(),
            tp: cm.tp,
            tn: cm.tn,
            fp: cm.fp,
            fn_: cm.fn_,
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            specificity: m.specificity,
            f1: m.f1,
        })
    }

    pub fn matrix(&self) -> ConfusionMatrix {
        ConfusionMatrix::new(self.tp, self.tn, self.fp, self.fn_)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn counts_by_hand() {
        let cm = confusion_matrix(&[1, 1, 0], &[1, 0, 1]).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(1, 0, 1, 1));
    }

    #[test]
    fn perfect_predictor() {
        let y = [1, 0, 0, 1, 1];
        let cm = confusion_matrix(&y, &y).unwrap();
        assert_eq!((cm.fp, cm.fn_), (0, 0));
    }

    #[test]
    fn all_positive_predictor() {
        let y: Vec<u8> = [vec![1; 21], vec![0; 9]].concat();
        let cm = confusion_matrix(&y, &[1; 30]).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(21, 0, 9, 0));
    }

    #[test]
    fn input_errors() {
        assert_eq!(confusion_matrix(&[], &[]), Err(EvalError::Empty));
        assert!(matches!(
            confusion_matrix(&[1], &[1, 0]),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert_eq!(confusion_matrix(&[2], &[1]), Err(EvalError::BadLabel(2)));
        assert_eq!(
            compute_metrics(&ConfusionMatrix::default()),
            Err(EvalError::Empty)
        );
    }

    #[test]
    fn metrics_all_positive_row() {
        let m = compute_metrics(&ConfusionMatrix::new(21, 0, 9, 0)).unwrap();
        assert_abs_diff_eq!(m.accuracy.unwrap(), 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(m.precision.unwrap(), 0.7, epsilon = 1e-12);
        assert_eq!(m.recall, Some(1.0));
        assert_eq!(m.specificity, Some(0.0));
        assert_abs_diff_eq!(m.f1.unwrap(), 14.0 / 17.0, epsilon = 1e-12);
    }

    #[test]
    fn undefined_scores_are_explicit() {
        // nothing predicted positive, no actual positives
        let m = compute_metrics(&ConfusionMatrix::new(0, 5, 0, 0)).unwrap();
        assert_eq!(m.accuracy, Some(1.0));
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, None);
        assert_eq!(m.f1, None);
        assert_eq!(m.specificity, Some(1.0));

        // precision and recall both zero: harmonic mean undefined
        let m = compute_metrics(&ConfusionMatrix::new(0, 1, 1, 1)).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (Some(0.0), Some(0.0), None));
    }

    #[test]
    fn report_json_shape() {
        let r = EvaluationReport::new("dt", &ConfusionMatrix::new(0, 5, 0, 0)).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in [
            "model",
            "tp",
            "tn",
            "fp",
            "fn",
            "accuracy",
            "precision",
            "recall",
            "specificity",
            "f1",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(v["precision"].is_null());
        assert_eq!(r.matrix().total(), 5);
    }
}
