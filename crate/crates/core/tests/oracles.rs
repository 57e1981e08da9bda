//! Classifiers checked against independent references: finite differences
//! for the logistic-regression gradient, exhaustive split enumeration for
//! the tree, and a grid search over the hinge objective for the SVM.

use proptest::prelude::*;
use trackwall::classifiers::{
    gradient, hinge_objective, log_loss, DTModel, DtHyper, LRModel, LrHyper, Node, SVMModel,
    SvmHyper,
};

/// Central-difference gradient of the log-loss, computed without touching
/// the analytic gradient.
fn numeric_gradient(w: &[f64], b: f64, x: &[Vec<f64>], y: &[u8], l2: f64) -> (Vec<f64>, f64) {
    let h = 1e-5;
    let gw = (0..w.len())
        .map(|j| {
            let mut plus = w.to_vec();
            let mut minus = w.to_vec();
            plus[j] += h;
            minus[j] -= h;
            (log_loss(&plus, b, x, y, l2) - log_loss(&minus, b, x, y, l2)) / (2.0 * h)
        })
        .collect();
    let gb = (log_loss(w, b + h, x, y, l2) - log_loss(w, b - h, x, y, l2)) / (2.0 * h);
    (gw, gb)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}

fn instance() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<u8>, Vec<f64>, f64, f64)> {
    (1usize..=6, 1usize..=10).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, d), n),
            prop::collection::vec(0u8..=1, n),
            prop::collection::vec(-1.5f64..1.5, d),
            -1.0f64..1.0,
            prop::sample::select(vec![0.0, 0.1, 1.0]),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lr_gradient_matches_central_differences((x, y, w, b, l2) in instance()) {
        let (gw, gb) = gradient(&w, b, &x, &y, l2);
        let (nw, nb) = numeric_gradient(&w, b, &x, &y, l2);
        for (a, n) in gw.iter().zip(&nw) {
            prop_assert!(rel_err(*a, *n) <= 1e-6, "analytic {a} numeric {n}");
        }
        prop_assert!(rel_err(gb, nb) <= 1e-6, "analytic {gb} numeric {nb}");
    }
}

/// Brute-force best root split: for each feature, split the rows by hand
/// and compute weighted Gini from scratch.
fn brute_force_root(x: &[Vec<f64>], y: &[u8]) -> Option<usize> {
    let gini = |labels: &[u8]| {
        let n = labels.len() as f64;
        let p1 = labels.iter().filter(|&&l| l == 1).count() as f64 / n;
        1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1)
    };
    let mut best: Option<(usize, f64)> = None;
    for f in 0..x[0].len() {
        let left: Vec<u8> = (0..x.len())
            .filter(|&i| x[i][f] < 0.5)
            .map(|i| y[i])
            .collect();
        let right: Vec<u8> = (0..x.len())
            .filter(|&i| x[i][f] >= 0.5)
            .map(|i| y[i])
            .collect();
        if left.is_empty() || right.is_empty() {
            continue;
        }
        let score =
            (left.len() as f64 * gini(&left) + right.len() as f64 * gini(&right)) / x.len() as f64;
        match best {
            Some((_, s)) if score >= s - 1e-12 => {}
            _ => best = Some((f, score)),
        }
    }
    best.map(|(f, _)| f)
}

fn binary_dataset() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<u8>)> {
    (1usize..=6, 1usize..=32).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(
                prop::collection::vec(prop::bool::ANY.prop_map(|b| f64::from(u8::from(b))), d),
                n,
            ),
            prop::collection::vec(0u8..=1, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dt_root_matches_exhaustive_search((x, y) in binary_dataset()) {
        let m = DTModel::fit(&x, &y, DtHyper::default()).unwrap();
        let pure = y.iter().all(|&l| l == y[0]);
        let expected = if pure { None } else { brute_force_root(&x, &y) };
        let got = match m.root {
            Node::Split { feature_index, .. } => Some(feature_index),
            Node::Leaf { .. } => None,
        };
        prop_assert_eq!(got, expected);
        m.validate().unwrap();
    }

    #[test]
    fn dt_fits_consistent_training_sets((x, y) in binary_dataset()) {
        // relabel so identical rows share a label (label = parity of a hash of the row)
        let y: Vec<u8> = x
            .iter()
            .zip(&y)
            .map(|(row, _)| (row.iter().enumerate().map(|(i, v)| (i + 1) * (*v as usize)).sum::<usize>() % 2) as u8)
            .collect();
        let m = DTModel::fit(&x, &y, DtHyper::default()).unwrap();
        for (row, &label) in x.iter().zip(&y) {
            prop_assert_eq!(m.predict(row).unwrap(), label);
        }
    }
}

#[test]
fn dt_reproduces_xor_truth_table() {
    let x = vec![
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
    ];
    let y = [0, 1, 1, 0];
    let m = DTModel::fit(&x, &y, DtHyper::default()).unwrap();
    assert_eq!(m.root.depth(), 2);
    for a in 0..2u8 {
        for b in 0..2u8 {
            assert_eq!(m.predict(&[a as f64, b as f64]).unwrap(), a ^ b);
        }
    }
}

/// Grid search for the minimizer of the hinge objective over
/// `w, b in [-3, 3]` at step 0.01.
fn grid_minimizer(x: &[Vec<f64>], y: &[u8], lambda: f64) -> (f64, f64, f64) {
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..=600 {
        let w = -3.0 + i as f64 * 0.01;
        for j in 0..=600 {
            let b = -3.0 + j as f64 * 0.01;
            let obj = hinge_objective(&[w], b, x, y, lambda).unwrap();
            if obj < best.2 - 1e-12 {
                best = (w, b, obj);
            }
        }
    }
    best
}

#[test]
fn svm_two_point_fixture_lands_near_grid_minimizer() {
    let x = vec![vec![1.0], vec![-1.0]];
    let y = [1, 0];
    let (gw, gb, gobj) = grid_minimizer(&x, &y, 1.0);
    assert!(
        (gw - 1.0).abs() < 1e-9 && gb.abs() < 1e-9,
        "grid found ({gw}, {gb})"
    );
    assert!((gobj - 0.5).abs() < 1e-12);

    let m = SVMModel::fit(
        &x,
        &y,
        SvmHyper {
            lambda: 1.0,
            ..SvmHyper::default()
        },
    )
    .unwrap();
    assert!((m.weights[0] - gw).abs() <= 0.1, "w = {}", m.weights[0]);
    assert!((m.bias - gb).abs() <= 0.1, "b = {}", m.bias);
}

fn blobs(seed: u64) -> (Vec<Vec<f64>>, Vec<u8>) {
    // Two clusters around (2, 2) and (-2, -2), jittered deterministically.
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut s = seed;
    let mut jitter = || {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((s >> 33) as f64 / (1u64 << 31) as f64) - 0.5
    };
    for i in 0..30 {
        let c = if i % 2 == 0 { 2.0 } else { -2.0 };
        x.push(vec![c + jitter(), c + jitter()]);
        y.push(u8::from(i % 2 == 0));
    }
    (x, y)
}

#[test]
fn svm_separates_blobs() {
    for seed in 0..5 {
        let (x, y) = blobs(seed);
        let m = SVMModel::fit(&x, &y, SvmHyper::default()).unwrap();
        for (row, &l) in x.iter().zip(&y) {
            assert_eq!(m.predict(row).unwrap(), l, "seed {seed}");
        }
        let fitted = hinge_objective(&m.weights, m.bias, &x, &y, 0.01).unwrap();
        let zero = hinge_objective(&[0.0, 0.0], 0.0, &x, &y, 0.01).unwrap();
        assert!(fitted <= zero);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svm_never_worse_than_zero_model((x, y) in binary_dataset(), seed in 0u64..1000) {
        let hyper = SvmHyper { seed, ..SvmHyper::default() };
        let m = SVMModel::fit(&x, &y, hyper).unwrap();
        let fitted = hinge_objective(&m.weights, m.bias, &x, &y, hyper.lambda).unwrap();
        let zero = hinge_objective(&vec![0.0; x[0].len()], 0.0, &x, &y, hyper.lambda).unwrap();
        prop_assert!(fitted <= zero + 1e-12, "fitted {fitted} > zero {zero}");
    }

    #[test]
    fn svm_prediction_scale_invariant(
        w in prop::collection::vec(-3.0f64..3.0, 4),
        b in -3.0f64..3.0,
        v in prop::collection::vec(0u8..=1, 4),
        c in 0.001f64..1000.0,
    ) {
        let v: Vec<f64> = v.into_iter().map(f64::from).collect();
        let base = SVMModel { weights: w.clone(), bias: b, hyper: SvmHyper::default() };
        let scaled = SVMModel {
            weights: w.iter().map(|x| x * c).collect(),
            bias: b * c,
            hyper: SvmHyper::default(),
        };
        prop_assert_eq!(base.predict(&v).unwrap(), scaled.predict(&v).unwrap());
    }

    #[test]
    fn logistic_symmetry(z in -700.0f64..700.0) {
        use trackwall::classifiers::logistic;
        prop_assert!((logistic(-z) - (1.0 - logistic(z))).abs() <= 1e-12);
    }

    #[test]
    fn logistic_monotone(a in -800.0f64..800.0, d in 1e-6f64..10.0, c in -10.0f64..10.0, e in 1e-3f64..1.0) {
        use trackwall::classifiers::logistic;
        // saturates in floating point far from 0, strictly increasing near it
        prop_assert!(logistic(a + d) >= logistic(a));
        prop_assert!(logistic(c + e) > logistic(c));
    }
}

#[test]
fn lr_loss_non_increasing_on_fixture() {
    let x = vec![
        vec![1.0, 0.0, 1.0],
        vec![0.0, 1.0, 0.0],
        vec![1.0, 1.0, 1.0],
        vec![0.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 1.0],
    ];
    let y = [1, 0, 1, 0, 1, 0];
    let mut losses = Vec::new();
    for iters in (0..=400).step_by(20) {
        let m = LRModel::fit(
            &x,
            &y,
            LrHyper {
                learning_rate: 0.1,
                iterations: iters,
                l2: 0.0,
            },
        )
        .unwrap();
        losses.push(log_loss(&m.weights, m.bias, &x, &y, 0.0));
    }
    assert!(losses.windows(2).all(|w| w[1] <= w[0]), "{losses:?}");
}

#[test]
fn fits_are_deterministic() {
    let (x, y) = blobs(3);
    assert_eq!(
        LRModel::fit(&x, &y, LrHyper::default()).unwrap(),
        LRModel::fit(&x, &y, LrHyper::default()).unwrap()
    );
    assert_eq!(
        SVMModel::fit(&x, &y, SvmHyper::default()).unwrap(),
        SVMModel::fit(&x, &y, SvmHyper::default()).unwrap()
    );
    let xb: Vec<Vec<f64>> = x
        .iter()
        .map(|r| r.iter().map(|v| f64::from(u8::from(*v > 0.0))).collect())
        .collect();
    assert_eq!(
        DTModel::fit(&xb, &y, DtHyper::default()).unwrap(),
        DTModel::fit(&xb, &y, DtHyper::default()).unwrap()
    );
}
