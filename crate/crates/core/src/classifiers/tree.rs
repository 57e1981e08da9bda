//! CART-style decision tree over binary features, split by Gini impurity.
//!
//! Feature values are read as bits (`>= 0.5` is 1). A node sends 0 to the
//! left child and 1 to the right. Splits are chosen by the lowest weighted
//! child impurity, ties going to the lowest feature index. A split that
//! leaves one side empty is never taken, so a feature is tested at most once
//! on any root-to-leaf path.

use serde::{Deserialize, Serialize};

use super::{check_training_data, check_width, ClassifierError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DtHyper {
    /// `None` grows until another stopping rule applies.
    pub max_depth: Option<usize>,
    /// Nodes with fewer samples than this become leaves.
    pub min_samples: usize,
}

impl Default for DtHyper {
    fn default() -> Self {
        DtHyper {
            max_depth: None,
            min_samples: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        class: u8,
    },
    Split {
        feature_index: usize,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DTModel {
    pub root: Node,
    pub n_features: usize,
    pub hyper: DtHyper,
}

/// `1 - p0^2 - p1^2` over binary labels.
pub fn gini_impurity(labels: &[u8]) -> Result<f64, ClassifierError> {
    if labels.is_empty() {
        return Err(ClassifierError::EmptyData);
    }
    let ones = labels.iter().filter(|&&l| l == 1).count();
    Ok(gini_from_counts(labels.len() - ones, ones))
}

fn gini_from_counts(zeros: usize, ones: usize) -> f64 {
    let n = (zeros + ones) as f64;
    let p0 = zeros as f64 / n;
    let p1 = ones as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

/// Scores closer than this are ties and go to the lower feature index.
const TIE_EPS: f64 = 1e-12;

#[inline]
fn bit(v: f64) -> bool {
    v >= 0.5
}

/// Majority class; ties go to class 1.
fn majority(zeros: usize, ones: usize) -> u8 {
    u8::from(ones >= zeros)
}

impl DTModel {
    pub fn fit(x: &[Vec<f64>], y: &[u8], hyper: DtHyper) -> Result<Self, ClassifierError> {
        let width = check_training_data(x, y)?;
        let idx: Vec<usize> = (0..x.len()).collect();
        let mut used = vec![false; width];
        let root = grow(x, y, &idx, 0, &mut used, &hyper);
        Ok(DTModel {
            root,
            n_features: width,
            hyper,
        })
    }

    pub fn predict(&self, v: &[f64]) -> Result<u8, ClassifierError> {
        check_width(self.n_features, v.len())?;
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { class } => return Ok(*class),
                Node::Split {
                    feature_index,
                    left,
                    right,
                } => node = if bit(v[*feature_index]) { right } else { left },
            }
        }
    }

    /// Checks that every split references an existing feature at most once
    /// per path and that leaves hold binary classes.
    pub fn validate(&self) -> Result<(), ClassifierError> {
        fn walk(n: &Node, width: usize, path: &mut Vec<usize>) -> Result<(), ClassifierError> {
            match n {
                Node::Leaf { class } if *class <= 1 => Ok(()),
                Node::Leaf { class } => {
                    Err(ClassifierError::InvalidModel(format!("leaf class {class}")))
                }
                Node::Split {
                    feature_index,
                    left,
                    right,
                } => {
                    if *feature_index >= width {
                        return Err(ClassifierError::InvalidModel(format!(
                            "feature index {feature_index} >= {width}"
                        )));
                    }
                    if path.contains(feature_index) {
                        return Err(ClassifierError::InvalidModel(format!(
                            "feature {feature_index} tested twice on one path"
                        )));
                    }
                    path.push(*feature_index);
                    walk(left, width, path)?;
                    walk(right, width, path)?;
                    path.pop();
                    Ok(())
                }
            }
        }
        walk(&self.root, self.n_features, &mut Vec::new())
    }
}

fn grow(
    x: &[Vec<f64>],
    y: &[u8],
    idx: &[usize],
    depth: usize,
    used: &mut [bool],
    hyper: &DtHyper,
) -> Node {
    let ones = idx.iter().filter(|&&i| y[i] == 1).count();
    let zeros = idx.len() - ones;
    let leaf = Node::Leaf {
        class: majority(zeros, ones),
    };
    if ones == 0 || zeros == 0 {
        return leaf;
    }
    if hyper.max_depth.is_some_and(|d| depth >= d) || idx.len() < hyper.min_samples {
        return leaf;
    }
    let Some(feature) = best_split(x, y, idx, used) else {
        return leaf;
    };

    let (right, left): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| bit(x[i][feature]));
    used[feature] = true;
    let l = grow(x, y, &left, depth + 1, used, hyper);
    let r = grow(x, y, &right, depth + 1, used, hyper);
    used[feature] = false;
    Node::Split {
        feature_index: feature,
        left: Box::new(l),
        right: Box::new(r),
    }
}

/// Feature with the lowest weighted child impurity among splits that put
/// samples on both sides.
fn best_split(x: &[Vec<f64>], y: &[u8], idx: &[usize], used: &[bool]) -> Option<usize> {
    let n = idx.len() as f64;
    let mut best: Option<(usize, f64)> = None;
    for f in (0..used.len()).filter(|&f| !used[f]) {
        // counts[side][label]
        let mut counts = [[0usize; 2]; 2];
        for &i in idx {
            counts[usize::from(bit(x[i][f]))][usize::from(y[i])] += 1;
        }
        let [l, r] = counts;
        let (nl, nr) = (l[0] + l[1], r[0] + r[1]);
        if nl == 0 || nr == 0 {
            continue;
        }
        let score = (nl as f64 * gini_from_counts(l[0], l[1])
            + nr as f64 * gini_from_counts(r[0], r[1]))
            / n;
        if best.is_none_or(|(_, s)| score < s - TIE_EPS) {
            best = Some((f, score));
        }
    }
    best.map(|(f, _)| f)
}
