use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{FittedModel, HeldOut, ModelKind, TrainingInfo};
use super::{accuracy, binary_design, check_fraction, check_two_classes, log_loss, split_indices, MissingPolicy};
use crate::corpus::AnalysisFrame;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features tried per split; `None` means ⌈√d⌉.
    pub features_per_split: Option<usize>,
    /// Draw each tree's training rows with replacement.
    pub bootstrap: bool,
    pub split_fraction: f64,
    pub seed: u64,
    pub missing: MissingPolicy,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            features_per_split: None,
            bootstrap: true,
            split_fraction: 0.8,
            seed: 0,
            missing: MissingPolicy::Listwise,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Leaf { p1: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// A CART tree; rows with `x[feature] <= threshold` go left.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Fraction of positive training rows in the leaf reached by `row`.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { p1 } => return p1,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    /// Root split, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first()? {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }
}

/// Share of trees voting positive.
pub(crate) fn forest_score(trees: &[Tree], row: &[f64]) -> f64 {
    let votes = trees.iter().filter(|t| t.predict(row) > 0.5).count();
    votes as f64 / trees.len() as f64
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of tree `t`: the `t`-th output of a splitmix64 sequence started at `seed`.
pub(crate) fn tree_seed(seed: u64, t: usize) -> u64 {
    splitmix64(seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(t as u64 + 1)))
}

fn gini(n1: f64, n: f64) -> f64 {
    let p = n1 / n;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    max_depth: Option<usize>,
    min_leaf: usize,
    mtry: usize,
    total: f64,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

impl Builder<'_> {
    fn best_split(&self, rows: &[usize], features: &[usize]) -> Option<BestSplit> {
        let n = rows.len() as f64;
        let n1: f64 = rows.iter().map(|&i| self.y[i]).sum();
        let parent = gini(n1, n);
        let mut best: Option<BestSplit> = None;
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
        for &f in features {
            pairs.clear();
            pairs.extend(rows.iter().map(|&i| (self.x[i][f], self.y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left1 = 0.0;
            for k in 1..pairs.len() {
                left1 += pairs[k - 1].1;
                if pairs[k - 1].0 == pairs[k].0 || k < self.min_leaf || pairs.len() - k < self.min_leaf {
                    continue;
                }
                let nl = k as f64;
                let nr = n - nl;
                let child = (nl * gini(left1, nl) + nr * gini(n1 - left1, nr)) / n;
                let decrease = parent - child;
                if best.as_ref().map_or(true, |b| decrease > b.decrease) {
                    let (lo, hi) = (pairs[k - 1].0, pairs[k].0);
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(BestSplit { feature: f, threshold, decrease });
                }
            }
        }
        best.filter(|b| b.decrease > 1e-12)
    }

    fn grow(&self, rows: Vec<usize>, rng: &mut ChaCha8Rng, importances: &mut [f64]) -> Tree {
        let d = importances.len();
        let mut nodes = vec![Node::Leaf { p1: 0.0 }];
        let mut stack = vec![(0usize, rows, 0usize)];
        while let Some((id, rows, depth)) = stack.pop() {
            let n = rows.len() as f64;
            let n1: f64 = rows.iter().map(|&i| self.y[i]).sum();
            let p1 = n1 / n;
            let can_split = n1 > 0.0
                && n1 < n
                && self.max_depth.map_or(true, |m| depth < m)
                && rows.len() >= 2 * self.min_leaf;
            let split = if can_split {
                let mut features = sample(rng, d, self.mtry).into_vec();
                features.sort_unstable();
                self.best_split(&rows, &features)
            } else {
                None
            };
            let Some(best) = split else {
                nodes[id] = Node::Leaf { p1 };
                continue;
            };
            importances[best.feature] += n / self.total * best.decrease;
            let (left, right): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&i| self.x[i][best.feature] <= best.threshold);
            let l = nodes.len();
            nodes.push(Node::Leaf { p1: 0.0 });
            nodes.push(Node::Leaf { p1: 0.0 });
            nodes[id] = Node::Split {
                feature: best.feature,
                threshold: best.threshold,
                left: l,
                right: l + 1,
            };
            stack.push((l + 1, right, depth + 1));
            stack.push((l, left, depth + 1));
        }
        Tree { nodes }
    }
}

/// Trains trees on row-major data. Each tree's randomness comes only from
/// its own seed, so the result does not depend on the thread count.
pub(crate) fn train_trees(x: &[Vec<f64>], y: &[f64], params: &ForestParams) -> Result<(Vec<Tree>, Vec<f64>)> {
    let d = x.first().map_or(0, Vec::len);
    if d == 0 {
        return Err(Error::NoFeatures);
    }
    if params.n_trees == 0 || params.min_leaf == 0 {
        return Err(Error::InvalidInput("n_trees and min_leaf must be positive".into()));
    }
    let mtry = params
        .features_per_split
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d);
    let results: Vec<(Tree, Vec<f64>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed(params.seed, t));
            let rows: Vec<usize> = if params.bootstrap {
                (0..x.len()).map(|_| rng.gen_range(0..x.len())).collect()
            } else {
                (0..x.len()).collect()
            };
            let builder = Builder {
                x,
                y,
                max_depth: params.max_depth,
                min_leaf: params.min_leaf,
                mtry,
                total: rows.len() as f64,
            };
            let mut imp = vec![0.0; d];
            let tree = builder.grow(rows, &mut rng, &mut imp);
            let sum: f64 = imp.iter().sum();
            if sum > 0.0 {
                imp.iter_mut().for_each(|v| *v /= sum);
            }
            (tree, imp)
        })
        .collect();
    let mut importances = vec![0.0; d];
    for (_, imp) in &results {
        for (a, b) in importances.iter_mut().zip(imp) {
            *a += b;
        }
    }
    let sum: f64 = importances.iter().sum();
    if sum > 0.0 {
        importances.iter_mut().for_each(|v| *v /= sum);
    } else {
        importances = vec![1.0 / d as f64; d];
    }
    Ok((results.into_iter().map(|(t, _)| t).collect(), importances))
}

/// Random forest classifier with a seeded hold-out split.
pub fn fit_random_forest(
    frame: &AnalysisFrame,
    outcome: &str,
    features: &[String],
    params: &ForestParams,
) -> Result<FittedModel> {
    check_fraction(params.split_fraction)?;
    let design = binary_design(frame, outcome, features, params.missing)?;
    if design.dropped > 0 {
        log::info!("random forest: {} rows with missing features dropped", design.dropped);
    }
    let (train, test) = split_indices(design.x.len(), params.split_fraction, params.seed);
    let x_train: Vec<Vec<f64>> = train.iter().map(|&i| design.x[i].clone()).collect();
    let y_train: Vec<f64> = train.iter().map(|&i| design.y[i]).collect();
    check_two_classes(&y_train)?;
    let (trees, importances) = train_trees(&x_train, &y_train, params)?;

    let probs: Vec<f64> = test.iter().map(|&i| forest_score(&trees, &design.x[i])).collect();
    let y_test: Vec<f64> = test.iter().map(|&i| design.y[i]).collect();
    let mut test_ids: Vec<String> = test.iter().map(|&i| frame.row_ids[design.rows[i]].clone()).collect();
    test_ids.sort();
    let d = design.features.len();

    Ok(FittedModel {
        kind: ModelKind::RandomForest,
        outcome: outcome.to_string(),
        features: design.features,
        coefficients: Vec::new(),
        importances,
        intercept: None,
        scaler: None,
        imputation: design.fill,
        training: TrainingInfo {
            seed: params.seed,
            split_fraction: params.split_fraction,
            train_rows: train.len(),
            test_rows: test.len(),
            dropped_rows: design.dropped,
            missing: params.missing,
            n_trees: Some(params.n_trees),
            max_depth: params.max_depth,
            min_leaf: Some(params.min_leaf),
            features_per_split: Some(params.features_per_split.unwrap_or_else(|| (d as f64).sqrt().ceil() as usize).clamp(1, d)),
            bootstrap: Some(params.bootstrap),
            ..TrainingInfo::default()
        },
        held_out: HeldOut {
            accuracy: accuracy(&probs, &y_test),
            log_loss: log_loss(&probs, &y_test),
        },
        test_ids,
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stump_finds_threshold() {
        let x: Vec<Vec<f64>> = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0].iter().map(|&v| vec![v]).collect();
        let y = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let params = ForestParams {
            n_trees: 1,
            max_depth: Some(1),
            bootstrap: false,
            ..ForestParams::default()
        };
        let (trees, imp) = train_trees(&x, &y, &params).unwrap();
        assert_eq!(trees[0].root_split(), Some((0, 3.5)));
        assert_eq!(imp, vec![1.0]);
        assert_eq!(trees[0].predict(&[3.0]), 0.0);
        assert_eq!(trees[0].predict(&[3.6]), 1.0);
    }

    #[test]
    fn tree_seeds_differ() {
        assert_ne!(tree_seed(7, 0), tree_seed(7, 1));
        assert_eq!(tree_seed(7, 3), tree_seed(7, 3));
    }
}
