//! Binary logistic regression trained by full-batch gradient descent on the
//! mean log-loss with an optional L2 penalty.

use serde::{Deserialize, Serialize};

use super::{check_training_data, check_width, dot, ClassifierError};

/// Probabilities are clamped to `[EPS, 1 - EPS]` inside the log-loss.
pub const LOG_LOSS_EPS: f64 = 1e-12;

/// Numerically stable logistic function.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrHyper {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

impl Default for LrHyper {
    fn default() -> Self {
        LrHyper {
            learning_rate: 0.1,
            iterations: 5000,
            l2: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LRModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyper: LrHyper,
}

impl LRModel {
    pub fn zeros(width: usize) -> Self {
        LRModel {
            weights: vec![0.0; width],
            bias: 0.0,
            hyper: LrHyper::default(),
        }
    }

    pub fn fit(x: &[Vec<f64>], y: &[u8], hyper: LrHyper) -> Result<Self, ClassifierError> {
        let width = check_training_data(x, y)?;
        if !(hyper.learning_rate > 0.0 && hyper.learning_rate.is_finite())
            || hyper.l2.is_nan()
            || hyper.l2 < 0.0
        {
            return Err(ClassifierError::Hyper(format!("{hyper:?}")));
        }
        let mut w = vec![0.0; width];
        let mut b = 0.0;
        for _ in 0..hyper.iterations {
            let (gw, gb) = gradient(&w, b, x, y, hyper.l2);
            for (wi, gi) in w.iter_mut().zip(&gw) {
                *wi -= hyper.learning_rate * gi;
            }
            b -= hyper.learning_rate * gb;
        }
        if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(ClassifierError::Diverged);
        }
        Ok(LRModel {
            weights: w,
            bias: b,
            hyper,
        })
    }

    pub fn predict_proba(&self, v: &[f64]) -> Result<f64, ClassifierError> {
        check_width(self.weights.len(), v.len())?;
        Ok(logistic(dot(&self.weights, v) + self.bias))
    }

    /// Ties at exactly 0.5 resolve to the invasive class.
    pub fn predict(&self, v: &[f64]) -> Result<u8, ClassifierError> {
        Ok(u8::from(self.predict_proba(v)? >= 0.5))
    }
}

/// Mean log-loss plus `(l2 / 2) * ||w||^2`.
pub fn log_loss(w: &[f64], b: f64, x: &[Vec<f64>], y: &[u8], l2: f64) -> f64 {
    let n = x.len() as f64;
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| {
            let p = logistic(dot(w, xi) + b).clamp(LOG_LOSS_EPS, 1.0 - LOG_LOSS_EPS);
            if yi == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / n;
    data + 0.5 * l2 * dot(w, w)
}

/// Analytic gradient of [`log_loss`] with respect to `(w, b)`.
pub fn gradient(w: &[f64], b: f64, x: &[Vec<f64>], y: &[u8], l2: f64) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let r = logistic(dot(w, xi) + b) - f64::from(yi);
        for (g, xv) in gw.iter_mut().zip(xi) {
            *g += r * xv;
        }
        gb += r;
    }
    for (g, wi) in gw.iter_mut().zip(w) {
        *g = *g / n + l2 * wi;
    }
    (gw, gb / n)
}
