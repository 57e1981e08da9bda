//! Logistic regression, decision tree and linear SVM, written against plain
//! `f64` rows. All three predict the invasive class on a tie.

mod logistic;
mod svm;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use logistic::{gradient, log_loss, logistic, LRModel, LrHyper, LOG_LOSS_EPS};
pub use svm::{hinge_objective, SVMModel, SvmHyper};
pub use tree::{gini_impurity, DTModel, DtHyper, Node};

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("no training samples")]
    EmptyData,
    #[error("{x} samples but {y} labels")]
    LengthMismatch { x: usize, y: usize },
    #[error("expected {expected} features, got {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("label {0} is not 0 or 1")]
    BadLabel(u8),
    #[error("non-finite feature value")]
    NonFinite,
    #[error("invalid hyperparameters: {0}")]
    Hyper(String),
    #[error("training diverged to non-finite parameters")]
    Diverged,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unknown model kind {0:?}")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Dt,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Lr, ModelKind::Dt, ModelKind::Svm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lr => "lr",
            ModelKind::Dt => "dt",
            ModelKind::Svm => "svm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(ModelKind::Lr),
            "dt" => Ok(ModelKind::Dt),
            "svm" => Ok(ModelKind::Svm),
            _ => Err(ClassifierError::UnknownKind(s.to_string())),
        }
    }
}

/// Training settings for any of the three model kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Hyper {
    Lr(LrHyper),
    Dt(DtHyper),
    Svm(SvmHyper),
}

impl Hyper {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Lr => Hyper::Lr(LrHyper::default()),
            ModelKind::Dt => Hyper::Dt(DtHyper::default()),
            ModelKind::Svm => Hyper::Svm(SvmHyper::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Hyper::Lr(_) => ModelKind::Lr,
            Hyper::Dt(_) => ModelKind::Dt,
            Hyper::Svm(_) => ModelKind::Svm,
        }
    }
}

/// A trained model of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Lr(LRModel),
    Dt(DTModel),
    Svm(SVMModel),
}

impl Model {
    pub fn fit(x: &[Vec<f64>], y: &[u8], hyper: Hyper) -> Result<Self, ClassifierError> {
        Ok(match hyper {
            Hyper::Lr(h) => Model::Lr(LRModel::fit(x, y, h)?),
            Hyper::Dt(h) => Model::Dt(DTModel::fit(x, y, h)?),
            Hyper::Svm(h) => Model::Svm(SVMModel::fit(x, y, h)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Lr(_) => ModelKind::Lr,
            Model::Dt(_) => ModelKind::Dt,
            Model::Svm(_) => ModelKind::Svm,
        }
    }

    pub fn hyper(&self) -> Hyper {
        match self {
            Model::Lr(m) => Hyper::Lr(m.hyper),
            Model::Dt(m) => Hyper::Dt(m.hyper),
            Model::Svm(m) => Hyper::Svm(m.hyper),
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Model::Lr(m) => m.weights.len(),
            Model::Dt(m) => m.n_features,
            Model::Svm(m) => m.weights.len(),
        }
    }

    pub fn predict(&self, v: &[f64]) -> Result<u8, ClassifierError> {
        match self {
            Model::Lr(m) => m.predict(v),
            Model::Dt(m) => m.predict(v),
            Model::Svm(m) => m.predict(v),
        }
    }

    /// Structural checks: finite parameters, tree shape.
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let finite = |w: &[f64], b: f64| {
            if w.iter().all(|v| v.is_finite()) && b.is_finite() {
                Ok(())
            } else {
                Err(ClassifierError::InvalidModel("non-finite parameter".into()))
            }
        };
        match self {
            Model::Lr(m) => finite(&m.weights, m.bias),
            Model::Svm(m) => finite(&m.weights, m.bias),
            Model::Dt(m) => m.validate(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_width(expected: usize, found: usize) -> Result<(), ClassifierError> {
    if expected == found {
        Ok(())
    } else {
        Err(ClassifierError::WidthMismatch { expected, found })
    }
}

/// Validates a training set and returns its row width.
pub(crate) fn check_training_data(x: &[Vec<f64>], y: &[u8]) -> Result<usize, ClassifierError> {
    if x.is_empty() {
        return Err(ClassifierError::EmptyData);
    }
    if x.len() != y.len() {
        return Err(ClassifierError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let width = x[0].len();
    for row in x {
        check_width(width, row.len())?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(ClassifierError::NonFinite);
        }
    }
    if let Some(&l) = y.iter().find(|&&l| l > 1) {
        return Err(ClassifierError::BadLabel(l));
    }
    Ok(width)
}
