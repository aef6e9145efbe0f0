use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tct_core::analysis::{
    bucket_curve, correlation_matrix, distribution_summary, fit_logistic, fit_random_forest, fit_standard_scaler,
    score_buckets, ForestParams, LogisticParams, MissingPolicy, StandardScaler,
};
use tct_core::corpus::{AnalysisFrame, OutcomeKind, OutcomeSeries};
use tct_core::Error;

fn frame(features: &[(&str, Vec<Option<f64>>)], outcome: Option<(OutcomeKind, Vec<f64>)>) -> AnalysisFrame {
    let n = features.first().map_or(0, |f| f.1.len());
    let mut outcomes = BTreeMap::new();
    if let Some((kind, values)) = outcome {
        outcomes.insert("y".to_string(), OutcomeSeries { kind, values });
    }
    AnalysisFrame {
        row_ids: (0..n).map(|i| format!("r{i:05}")).collect(),
        features: features.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        outcomes,
        dropped: 0,
        warnings: Vec::new(),
    }
}

fn some(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().copied().map(Some).collect()
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

// ---------- summaries and correlations ----------

#[test]
fn distribution_examples() {
    let f = frame(
        &[
            ("const", some(&[5.0; 4])),
            ("seq", some(&[1.0, 2.0, 3.0, 4.0])),
            ("none", vec![None; 4]),
        ],
        None,
    );
    let s = distribution_summary(&f, &names(&["const", "seq", "none"])).unwrap();
    assert_eq!(s[0].std, Some(0.0));
    let occupied = s[0].histogram.as_ref().unwrap().counts.iter().filter(|&&c| c > 0).count();
    assert_eq!(occupied, 1);
    assert_eq!(s[1].mean, Some(2.5));
    assert_eq!(s[1].median, Some(2.5));
    assert_eq!(s[1].histogram.as_ref().unwrap().counts.len(), 30);
    assert_eq!((s[2].count, s[2].missing, s[2].mean), (0, 4, None));
    assert!(matches!(distribution_summary(&f, &names(&["nope"])), Err(Error::UnknownColumn(_))));
}

/// Textbook two-pass Pearson, written independently of the library.
fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[test]
fn correlation_examples() {
    let f = frame(
        &[("x", some(&[1.0, 2.0, 3.0])), ("y", some(&[1.0, 3.0, 2.0])), ("neg", some(&[-1.0, -2.0, -3.0]))],
        None,
    );
    let m = correlation_matrix(&f, &names(&["x", "y", "neg"])).unwrap();
    assert_eq!(m.get("x", "x"), Some(1.0));
    assert!((m.get("x", "y").unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(m.get("x", "neg"), Some(-1.0));
    assert!(correlation_matrix(&f, &names(&["x"])).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn correlation_matrix_is_bounded_symmetric_and_pairwise(
        cols in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.8, -100.0f64..100.0), 12), 2..5)
    ) {
        let named: Vec<(String, Vec<Option<f64>>)> =
            cols.iter().enumerate().map(|(i, c)| (format!("c{i}"), c.clone())).collect();
        let borrowed: Vec<(&str, Vec<Option<f64>>)> = named.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        let f = frame(&borrowed, None);
        let keys: Vec<String> = named.iter().map(|c| c.0.clone()).collect();
        let m = correlation_matrix(&f, &keys).unwrap();
        for i in 0..keys.len() {
            prop_assert_eq!(m.values[i][i], Some(1.0));
            for j in 0..keys.len() {
                prop_assert_eq!(m.values[i][j], m.values[j][i]);
                if i == j { continue; }
                let pairs: Vec<(f64, f64)> = cols[i].iter().zip(&cols[j])
                    .filter_map(|(a, b)| Some(((*a)?, (*b)?))).collect();
                if let Some(r) = m.values[i][j] {
                    prop_assert!((-1.0..=1.0).contains(&r));
                    let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
                    prop_assert!((r - pearson_oracle(&x, &y)).abs() < 1e-9);
                } else {
                    prop_assert!(pairs.len() < 3);
                }
            }
        }
    }
}

// ---------- bucket curves ----------

#[test]
fn bucket_sizes_follow_the_partial_rule() {
    for (rows, want) in [(300, vec![100, 100, 100]), (250, vec![100, 100, 50]), (240, vec![100, 140])] {
        let x: Vec<f64> = (0..rows).map(f64::from).collect();
        let y: Vec<f64> = (0..rows).map(|i| f64::from(i % 2)).collect();
        let f = frame(&[("m", some(&x))], Some((OutcomeKind::Binary, y)));
        let c = bucket_curve(&f, "m", "y", 100).unwrap();
        assert_eq!(c.points.iter().map(|p| p.n).collect::<Vec<_>>(), want);
    }
    let f = frame(&[("m", some(&[1.0; 10]))], Some((OutcomeKind::Binary, vec![1.0; 10])));
    assert!(matches!(bucket_curve(&f, "m", "y", 100), Err(Error::TooFewRows { .. })));
}

#[test]
fn constant_outcome_has_flat_curve() {
    let x: Vec<f64> = (0..300).map(|i| f64::from(i) * 0.37).collect();
    let f = frame(&[("m", some(&x))], Some((OutcomeKind::Binary, vec![1.0; 300])));
    let c = bucket_curve(&f, "m", "y", 100).unwrap();
    assert!(c.points.iter().all(|p| p.outcome_mean == 1.0 && p.outcome_se == Some(0.0)));
    assert_eq!(c.slope(), Some(0.0));
}

#[test]
fn binary_standard_error() {
    let x: Vec<f64> = (0..100).map(f64::from).collect();
    let y: Vec<f64> = (0..100).map(|i| if i < 30 { 1.0 } else { 0.0 }).collect();
    let f = frame(&[("m", some(&x))], Some((OutcomeKind::Binary, y)));
    let p = &bucket_curve(&f, "m", "y", 100).unwrap().points[0];
    assert!((p.outcome_se.unwrap() - (0.3f64 * 0.7 / 100.0).sqrt()).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bucket_membership_survives_monotone_transforms(
        xs in prop::collection::vec(-5.0f64..5.0, 60..200),
        size in 5usize..40,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = xs.iter().map(|_| f64::from(rng.gen_bool(0.5))).collect();
        let transformed: Vec<f64> = xs.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
        let f = frame(&[("a", some(&xs)), ("b", some(&transformed))], Some((OutcomeKind::Binary, y)));
        let (a, b) = (bucket_curve(&f, "a", "y", size).unwrap(), bucket_curve(&f, "b", "y", size).unwrap());
        let outcomes = |c: &tct_core::analysis::BucketCurve| {
            c.points.iter().map(|p| (p.n, p.outcome_mean.to_bits())).collect::<Vec<_>>()
        };
        prop_assert_eq!(outcomes(&a), outcomes(&b));
        prop_assert!(a.points.windows(2).all(|w| w[0].metric_mean <= w[1].metric_mean));
    }
}

// ---------- scaler ----------

#[test]
fn scaler_examples() {
    let (s, keep) = StandardScaler::fit(&names(&["f", "c"]), &[vec![2.0, 7.0], vec![4.0, 7.0]]).unwrap();
    assert_eq!(keep, [0]);
    assert_eq!(s.dropped, ["c"]);
    assert_eq!(s.means, [3.0]);
    assert_eq!(s.transform(&[2.0]), [-1.0]);
    assert_eq!(s.transform(&[4.0]), [1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaler_round_trip_and_centering(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..40)) {
        let f = frame(
            &[
                ("a", rows.iter().map(|r| Some(r[0])).collect()),
                ("b", rows.iter().map(|r| Some(r[1])).collect()),
                ("c", rows.iter().map(|r| Some(r[2])).collect()),
            ],
            None,
        );
        let all: Vec<usize> = (0..rows.len()).collect();
        let s = fit_standard_scaler(&f, &names(&["a", "b", "c"]), &all).unwrap();
        let idx: Vec<usize> = s.features.iter().map(|n| ["a", "b", "c"].iter().position(|x| x == n).unwrap()).collect();
        let mut sums = vec![0.0; idx.len()];
        for r in &rows {
            let kept: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
            let z = s.transform(&kept);
            for (acc, v) in sums.iter_mut().zip(&z) {
                *acc += v;
            }
            let back = s.inverse_transform(&z);
            for (x, y) in kept.iter().zip(&back) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
        for acc in sums {
            prop_assert!((acc / rows.len() as f64).abs() < 1e-9);
        }
    }
}

// ---------- logistic regression ----------

fn gaussian_rows(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0) + rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn columns(rows: &[Vec<f64>], prefix: &str) -> Vec<(String, Vec<Option<f64>>)> {
    (0..rows[0].len())
        .map(|j| (format!("{prefix}{j}"), rows.iter().map(|r| Some(r[j])).collect()))
        .collect()
}

fn frame_of(rows: &[Vec<f64>], y: Vec<f64>) -> (AnalysisFrame, Vec<String>) {
    let cols = columns(rows, "f");
    let borrowed: Vec<(&str, Vec<Option<f64>>)> = cols.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let names = cols.iter().map(|c| c.0.clone()).collect();
    (frame(&borrowed, Some((OutcomeKind::Binary, y))), names)
}

#[test]
fn separable_logistic_is_accurate() {
    let rows = gaussian_rows(1, 2000, 3);
    let y: Vec<f64> = rows.iter().map(|r| f64::from(r[0] > 0.0)).collect();
    let (f, feats) = frame_of(&rows, y);
    let m = fit_logistic(&f, "y", &feats, &LogisticParams::default()).unwrap();
    assert!(m.coefficient("f0").unwrap() > 0.0);
    assert!(m.held_out.accuracy.unwrap() >= 0.95, "{:?}", m.held_out);
    let top = &m.ranked()[0].0;
    assert_eq!(top, "f0");
}

#[test]
fn heavy_penalty_shrinks_coefficients() {
    let rows = gaussian_rows(2, 500, 3);
    let y: Vec<f64> = rows.iter().map(|r| f64::from(r[0] + 0.5 * r[1] > 0.0)).collect();
    let (f, feats) = frame_of(&rows, y);
    let params = LogisticParams {
        l2: 1e6,
        ..LogisticParams::default()
    };
    let m = fit_logistic(&f, "y", &feats, &params).unwrap();
    assert!(m.coefficients.iter().all(|w| w.abs() < 0.01), "{:?}", m.coefficients);
}

#[test]
fn mirrored_features_get_opposite_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 3000;
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
    let y: Vec<f64> = a
        .iter()
        .zip(&b)
        .map(|(p, q)| f64::from(rng.gen_bool(1.0 / (1.0 + (-(0.6 * (p - 5.0) - 0.4 * (q - 5.0))).exp()))))
        .collect();
    let f = frame(&[("correct", some(&a)), ("incorrect", some(&b))], Some((OutcomeKind::Binary, y)));
    let m = fit_logistic(&f, "y", &names(&["correct", "incorrect"]), &LogisticParams::default()).unwrap();
    assert!(m.coefficient("correct").unwrap() > 0.0);
    assert!(m.coefficient("incorrect").unwrap() < 0.0);
}

#[test]
fn logistic_errors() {
    let rows = gaussian_rows(3, 50, 1);
    let (f, feats) = frame_of(&rows, vec![1.0; 50]);
    assert!(matches!(fit_logistic(&f, "y", &feats, &LogisticParams::default()), Err(Error::SingleClass)));
    let y: Vec<f64> = (0..50).map(|i| f64::from(i % 2)).collect();
    let f = frame(&[("c", some(&[1.0; 50]))], Some((OutcomeKind::Binary, y)));
    assert!(matches!(fit_logistic(&f, "y", &names(&["c"]), &LogisticParams::default()), Err(Error::NoFeatures)));
}

#[test]
fn missing_values_are_dropped_or_imputed() {
    let rows = gaussian_rows(4, 400, 2);
    let y: Vec<f64> = rows.iter().map(|r| f64::from(r[0] > 0.0)).collect();
    let (mut f, feats) = frame_of(&rows, y);
    let col = f.features.get_mut("f1").unwrap();
    for v in col.iter_mut().step_by(10) {
        *v = None;
    }
    let m = fit_logistic(&f, "y", &feats, &LogisticParams::default()).unwrap();
    assert_eq!(m.training.dropped_rows, 40);
    let params = LogisticParams {
        missing: MissingPolicy::MeanImpute,
        ..LogisticParams::default()
    };
    let m = fit_logistic(&f, "y", &feats, &params).unwrap();
    assert_eq!(m.training.dropped_rows, 0);
    assert_eq!(m.training.train_rows + m.training.test_rows, 400);
}

#[test]
fn logistic_is_deterministic_per_seed() {
    let rows = gaussian_rows(5, 600, 3);
    let y: Vec<f64> = rows.iter().map(|r| f64::from(r[1] > 0.1)).collect();
    let (f, feats) = frame_of(&rows, y);
    let p = LogisticParams {
        seed: 17,
        ..LogisticParams::default()
    };
    let a = serde_json::to_string(&fit_logistic(&f, "y", &feats, &p).unwrap()).unwrap();
    let b = serde_json::to_string(&fit_logistic(&f, "y", &feats, &p).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = LogisticParams { seed: 18, ..p };
    let c = fit_logistic(&f, "y", &feats, &other).unwrap();
    assert_ne!(serde_json::to_string(&c).unwrap(), a);
}

#[test]
fn calibrated_scores_track_bucket_outcomes() {
    let rows = gaussian_rows(6, 20_000, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let y: Vec<f64> = rows
        .iter()
        .map(|r| f64::from(rng.gen_bool(1.0 / (1.0 + (-(1.2 * r[0] - 0.8 * r[1])).exp()))))
        .collect();
    let (f, feats) = frame_of(&rows, y);
    let m = fit_logistic(&f, "y", &feats, &LogisticParams::default()).unwrap();
    let c = score_buckets(&m, &f, 400).unwrap();
    let mut outside = 0;
    for p in &c.points {
        if (p.outcome_mean - p.metric_mean).abs() > 2.0 * p.outcome_se.unwrap().max(1e-3) {
            outside += 1;
        }
    }
    // Two standard errors: expect roughly 5% of buckets outside by chance.
    assert!(outside <= 2, "{outside} of {} buckets miscalibrated", c.points.len());
    assert!(c.spread().unwrap() >= 0.3);
}

#[test]
fn constant_score_has_no_spread() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 1000;
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let y: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_bool(0.5))).collect();
    let f = frame(&[("noise", some(&x))], Some((OutcomeKind::Binary, y)));
    let params = LogisticParams {
        l2: 1e9,
        ..LogisticParams::default()
    };
    let m = fit_logistic(&f, "y", &names(&["noise"]), &params).unwrap();
    let c = score_buckets(&m, &f, 100).unwrap();
    assert!(c.spread().unwrap().abs() < 0.2, "{:?}", c.spread());
}

// ---------- random forest ----------

/// Best Gini split of one feature by exhaustive search over midpoints;
/// returns every threshold that attains the minimum weighted impurity.
fn best_stump_thresholds(x: &[f64], y: &[f64]) -> Vec<f64> {
    let gini = |ys: &[f64]| {
        if ys.is_empty() {
            return 0.0;
        }
        let p = ys.iter().sum::<f64>() / ys.len() as f64;
        2.0 * p * (1.0 - p)
    };
    let mut values: Vec<f64> = x.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut scored = Vec::new();
    for w in values.windows(2) {
        let t = (w[0] + w[1]) / 2.0;
        let left: Vec<f64> = x.iter().zip(y).filter(|(v, _)| **v <= t).map(|p| *p.1).collect();
        let right: Vec<f64> = x.iter().zip(y).filter(|(v, _)| **v > t).map(|p| *p.1).collect();
        let n = x.len() as f64;
        let score = left.len() as f64 / n * gini(&left) + right.len() as f64 / n * gini(&right);
        scored.push((score, t));
    }
    let best = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    scored.into_iter().filter(|s| s.0 <= best + 1e-12).map(|s| s.1).collect()
}

#[test]
fn single_stump_matches_exhaustive_search() {
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 80;
        let x: Vec<f64> = (0..n).map(|_| (rng.gen_range(0.0..100.0f64)).round()).collect();
        let cut = rng.gen_range(20.0..80.0);
        let y: Vec<f64> = x
            .iter()
            .map(|&v| f64::from((v > cut) ^ rng.gen_bool(0.15)))
            .collect();
        let f = frame(&[("x", some(&x))], Some((OutcomeKind::Binary, y.clone())));
        let params = ForestParams {
            n_trees: 1,
            max_depth: Some(1),
            bootstrap: false,
            split_fraction: 1.0,
            seed,
            ..ForestParams::default()
        };
        let m = fit_random_forest(&f, "y", &names(&["x"]), &params).unwrap();
        let (feature, threshold) = m.tree_root_split(0).unwrap();
        assert_eq!(feature, "x");
        let oracle = best_stump_thresholds(&x, &y);
        assert!(oracle.contains(&threshold), "seed {seed}: {threshold} not in {oracle:?}");
    }
}

#[test]
fn informative_feature_dominates_importances() {
    let rows = gaussian_rows(8, 1500, 5);
    let y: Vec<f64> = rows.iter().map(|r| f64::from(r[0] > 0.0)).collect();
    let (f, feats) = frame_of(&rows, y);
    let params = ForestParams {
        n_trees: 40,
        seed: 3,
        ..ForestParams::default()
    };
    let m = fit_random_forest(&f, "y", &feats, &params).unwrap();
    let total: f64 = m.importances.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
    let signal = m.importance("f0").unwrap();
    for noise in &feats[1..] {
        assert!(signal > m.importance(noise).unwrap());
    }
    assert!(m.held_out.accuracy.unwrap() > 0.9);

    let again = fit_random_forest(&f, "y", &feats, &params).unwrap();
    assert_eq!(serde_json::to_string(&m).unwrap(), serde_json::to_string(&again).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn forest_importances_sum_to_one(seed in any::<u64>(), d in 1usize..5) {
        let rows = gaussian_rows(seed, 120, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mut y: Vec<f64> = rows.iter().map(|_| f64::from(rng.gen_bool(0.5))).collect();
        y[0] = 0.0;
        y[1] = 1.0;
        let (f, feats) = frame_of(&rows, y);
        let params = ForestParams { n_trees: 8, seed, split_fraction: 1.0, ..ForestParams::default() };
        let m = fit_random_forest(&f, "y", &feats, &params).unwrap();
        prop_assert!((m.importances.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert_eq!(m.importances.len(), d);
    }
}
