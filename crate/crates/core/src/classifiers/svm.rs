//! Linear SVM trained with Pegasos-style stochastic subgradient descent on
//! the regularized hinge objective. Labels `{0, 1}` are mapped to
//! `{-1, +1}` internally; the bias is not regularized.
//!
//! Step `t` uses the rate `1 / (lambda * t)`. After each step the weights
//! are projected onto the ball of radius `sqrt(2 / lambda)`, which holds
//! every weight vector that can beat the zero model. Subgradient steps do
//! not decrease the objective monotonically, so the objective is evaluated
//! at every epoch boundary (starting from the zero model) and the best
//! iterate is returned.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{check_training_data, check_width, dot, ClassifierError};

pub const DEFAULT_EPOCHS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmHyper {
    pub lambda: f64,
    /// Number of SGD steps; `None` runs `DEFAULT_EPOCHS * n`.
    pub iterations: Option<usize>,
    pub seed: u64,
}

impl Default for SvmHyper {
    fn default() -> Self {
        SvmHyper {
            lambda: 0.01,
            iterations: None,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SVMModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyper: SvmHyper,
}

#[inline]
fn signed(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `(lambda / 2) * ||w||^2 + mean(max(0, 1 - y_i (w . x_i + b)))` with
/// labels mapped to `{-1, +1}`.
pub fn hinge_objective(
    w: &[f64],
    b: f64,
    x: &[Vec<f64>],
    y: &[u8],
    lambda: f64,
) -> Result<f64, ClassifierError> {
    let width = check_training_data(x, y)?;
    check_width(w.len(), width)?;
    let hinge = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| (1.0 - signed(yi) * (dot(w, xi) + b)).max(0.0))
        .sum::<f64>()
        / x.len() as f64;
    Ok(0.5 * lambda * dot(w, w) + hinge)
}

impl SVMModel {
    pub fn fit(x: &[Vec<f64>], y: &[u8], hyper: SvmHyper) -> Result<Self, ClassifierError> {
        let width = check_training_data(x, y)?;
        if !(hyper.lambda > 0.0 && hyper.lambda.is_finite()) {
            return Err(ClassifierError::Hyper(format!("lambda {}", hyper.lambda)));
        }
        let n = x.len();
        let steps = hyper.iterations.unwrap_or(DEFAULT_EPOCHS * n);
        let radius = (2.0 / hyper.lambda).sqrt();
        let objective = |w: &[f64], b: f64| hinge_objective(w, b, x, y, hyper.lambda);

        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let mut w = vec![0.0; width];
        let mut b = 0.0;
        let mut best = (w.clone(), b, objective(&w, b)?);

        for t in 1..=steps {
            let i = (rng.next_u64() % n as u64) as usize;
            let eta = 1.0 / (hyper.lambda * t as f64);
            let yi = signed(y[i]);
            let margin = yi * (dot(&w, &x[i]) + b);
            let shrink = 1.0 - eta * hyper.lambda;
            for wj in w.iter_mut() {
                *wj *= shrink;
            }
            if margin < 1.0 {
                for (wj, xj) in w.iter_mut().zip(&x[i]) {
                    *wj += eta * yi * xj;
                }
                b += eta * yi;
            }
            let norm = dot(&w, &w).sqrt();
            if norm > radius {
                let scale = radius / norm;
                for wj in w.iter_mut() {
                    *wj *= scale;
                }
            }
            if t % n == 0 || t == steps {
                let obj = objective(&w, b)?;
                if obj < best.2 {
                    best = (w.clone(), b, obj);
                }
            }
        }
        let (w, b, _) = best;
        if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(ClassifierError::Diverged);
        }
        Ok(SVMModel {
            weights: w,
            bias: b,
            hyper,
        })
    }

    pub fn decision(&self, v: &[f64]) -> Result<f64, ClassifierError> {
        check_width(self.weights.len(), v.len())?;
        Ok(dot(&self.weights, v) + self.bias)
    }

    /// Points on the hyperplane are classed invasive.
    pub fn predict(&self, v: &[f64]) -> Result<u8, ClassifierError> {
        Ok(u8::from(self.decision(v)? >= 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pair() -> (Vec<Vec<f64>>, Vec<u8>) {
        (vec![vec![1.0], vec![-1.0]], vec![1, 0])
    }

    #[test]
    fn objective_closed_forms() {
        let (x, y) = pair();
        assert_abs_diff_eq!(hinge_objective(&[0.0], 0.0, &x, &y, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(hinge_objective(&[1.0], 0.0, &x, &y, 1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(hinge_objective(&[0.5], 0.0, &x, &y, 1.0).unwrap(), 0.625);
        assert!(hinge_objective(&[1.0, 2.0], 0.0, &x, &y, 1.0).is_err());
    }

    #[test]
    fn zero_model_predicts_invasive() {
        let m = SVMModel {
            weights: vec![0.0, 0.0],
            bias: 0.0,
            hyper: SvmHyper::default(),
        };
        assert_eq!(m.predict(&[1.0, 0.0]).unwrap(), 1);
        assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), 1);
    }

    #[test]
    fn sign_test() {
        let m = SVMModel {
            weights: vec![1.0],
            bias: -0.5,
            hyper: SvmHyper::default(),
        };
        assert_eq!(m.predict(&[1.0]).unwrap(), 1);
        assert_eq!(m.predict(&[0.0]).unwrap(), 0);
        assert!(m.predict(&[]).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let x: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i % 2) as f64, (i % 3) as f64])
            .collect();
        let y: Vec<u8> = (0..12).map(|i| u8::from(i % 2 == 0)).collect();
        let a = SVMModel::fit(&x, &y, SvmHyper::default()).unwrap();
        let b = SVMModel::fit(&x, &y, SvmHyper::default()).unwrap();
        assert_eq!(a, b);
        let c = SVMModel::fit(
            &x,
            &y,
            SvmHyper {
                seed: 7,
                ..SvmHyper::default()
            },
        )
        .unwrap();
        assert_ne!(a.weights, c.weights);
    }

    #[test]
    fn constant_labels_constant_decision() {
        let x: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![(i % 2) as f64, (i / 4) as f64])
            .collect();
        let m = SVMModel::fit(&x, &[1; 8], SvmHyper::default()).unwrap();
        let preds: Vec<u8> = x.iter().map(|v| m.predict(v).unwrap()).collect();
        assert!(preds.iter().all(|&p| p == preds[0]), "{preds:?}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SVMModel::fit(&[], &[], SvmHyper::default()),
            Err(ClassifierError::EmptyData)
        ));
        let (x, y) = pair();
        assert!(SVMModel::fit(
            &x,
            &y,
            SvmHyper {
                lambda: 0.0,
                ..SvmHyper::default()
            }
        )
        .is_err());
    }
}
