//! Seeded train/test split.
//!
//! The permutation is a Fisher-Yates shuffle driven by ChaCha8 seeded
//! through `rand_core`'s `seed_from_u64`: for `i` from `n-1` down to `1`,
//! draw `j = next_u64() % (i + 1)` and swap `i` and `j`. The first
//! `floor(ratio * n)` permuted indices form the training set.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::encode::{Dataset, FeatureVector};
use super::FeatureError;

/// Identifier stored with every split so it can be reproduced elsewhere.
pub const SPLIT_GENERATOR: &str = "chacha8-seed_from_u64/fisher-yates-mod";

/// Slack applied before flooring so ratios like 0.7 on 90 rows give 63,
/// not 62 through rounding error.
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitOptions {
    pub ratio: f64,
    pub seed: u64,
    /// Split each class separately so both sides keep the label balance.
    pub stratified: bool,
}

impl SplitOptions {
    pub fn new(ratio: f64, seed: u64) -> Self {
        SplitOptions {
            ratio,
            seed,
            stratified: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub x_train: Vec<FeatureVector>,
    pub x_test: Vec<FeatureVector>,
    pub y_train: Vec<u8>,
    pub y_test: Vec<u8>,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub ratio: f64,
    pub stratified: bool,
    pub generator: &'static str,
}

/// Deterministic permutation of `0..n`.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    idx
}

pub fn train_count(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64) + FLOOR_SLACK).floor() as usize
}

pub fn split_dataset(ds: &Dataset, opts: SplitOptions) -> Result<SplitDataset, FeatureError> {
    let n = ds.len();
    if !(opts.ratio > 0.0 && opts.ratio < 1.0) {
        return Err(FeatureError::InvalidRatio(opts.ratio));
    }
    if n < 2 {
        return Err(FeatureError::DegenerateSplit { train: n, test: 0 });
    }
    let perm = permutation(n, opts.seed);

    let (train_indices, test_indices): (Vec<usize>, Vec<usize>) = if opts.stratified {
        let mut quota = [0usize; 2];
        for class in 0..2u8 {
            let count = ds.y.iter().filter(|&&l| l == class).count();
            quota[class as usize] = train_count(count, opts.ratio);
        }
        let mut train = Vec::new();
        let mut test = Vec::new();
        for &i in &perm {
            let q = &mut quota[ds.y[i] as usize];
            if *q > 0 {
                *q -= 1;
                train.push(i);
            } else {
                test.push(i);
            }
        }
        (train, test)
    } else {
        let k = train_count(n, opts.ratio);
        (perm[..k].to_vec(), perm[k..].to_vec())
    };

    if train_indices.is_empty() || test_indices.is_empty() {
        return Err(FeatureError::DegenerateSplit {
            train: train_indices.len(),
            test: test_indices.len(),
        });
    }

    let take = |ix: &[usize]| -> (Vec<FeatureVector>, Vec<u8>) {
        ix.iter().map(|&i| (ds.x[i].clone(), ds.y[i])).unzip()
    };
    let (x_train, y_train) = take(&train_indices);
    let (x_test, y_test) = take(&test_indices);
    Ok(SplitDataset {
        x_train,
        x_test,
        y_train,
        y_test,
        train_indices,
        test_indices,
        seed: opts.seed,
        ratio: opts.ratio,
        stratified: opts.stratified,
        generator: SPLIT_GENERATOR,
    })
}
