use serde::{Deserialize, Serialize};

use super::bucket::{bucket_curve_from, BucketCurve};
use super::forest::{forest_score, Tree};
use super::scaler::StandardScaler;
use super::{sigmoid, MissingPolicy};
use crate::corpus::AnalysisFrame;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logistic,
    RandomForest,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub seed: u64,
    pub split_fraction: f64,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Rows dropped for missing feature values.
    pub dropped_rows: usize,
    pub missing: MissingPolicy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_strength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_trees: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_leaf: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub features_per_split: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<bool>,
}

/// Held-out accuracy (threshold 0.5) and log-loss; `None` with no test rows.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HeldOut {
    pub accuracy: Option<f64>,
    pub log_loss: Option<f64>,
}

/// A trained classifier. Coefficients are on the standardised scale, so
/// their magnitudes are directly comparable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub kind: ModelKind,
    pub outcome: String,
    /// Retained features, aligned with `coefficients` or `importances`.
    pub features: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub importances: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<StandardScaler>,
    /// Fill values per feature when mean imputation was used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imputation: Option<Vec<f64>>,
    pub training: TrainingInfo,
    pub held_out: HeldOut,
    /// Record ids of the held-out rows, sorted.
    pub test_ids: Vec<String>,
    #[serde(skip)]
    pub(crate) trees: Vec<Tree>,
}

impl FittedModel {
    /// Score for raw feature values aligned with `features`: the predicted
    /// probability for logistic models, the positive vote share for forests.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.features.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} feature values, got {}",
                self.features.len(),
                row.len()
            )));
        }
        match self.kind {
            ModelKind::Logistic => {
                let scaler = self
                    .scaler
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("logistic model without scaler".into()))?;
                let z = scaler
                    .transform(row)
                    .iter()
                    .zip(&self.coefficients)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    + self.intercept.unwrap_or(0.0);
                Ok(sigmoid(z))
            }
            ModelKind::RandomForest => {
                if self.trees.is_empty() {
                    return Err(Error::InvalidInput("forest has no trained trees".into()));
                }
                Ok(forest_score(&self.trees, row))
            }
        }
    }

    fn weight_of(&self, values: &[f64], name: &str) -> Option<f64> {
        let i = self.features.iter().position(|f| f == name)?;
        values.get(i).copied()
    }

    /// Feature and threshold of the root split of tree `t` in a forest.
    pub fn tree_root_split(&self, t: usize) -> Option<(&str, f64)> {
        let (f, threshold) = self.trees.get(t)?.root_split()?;
        Some((self.features[f].as_str(), threshold))
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.weight_of(&self.coefficients, name)
    }

    pub fn importance(&self, name: &str) -> Option<f64> {
        self.weight_of(&self.importances, name)
    }

    /// Features with their coefficient or importance, largest magnitude first.
    pub fn ranked(&self) -> Vec<(String, f64)> {
        let values = match self.kind {
            ModelKind::Logistic => &self.coefficients,
            ModelKind::RandomForest => &self.importances,
        };
        let mut out: Vec<(String, f64)> = self.features.iter().cloned().zip(values.iter().copied()).collect();
        out.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

/// Buckets the held-out rows by predicted score.
pub fn score_buckets(model: &FittedModel, frame: &AnalysisFrame, bucket_size: usize) -> Result<BucketCurve> {
    let series = frame.outcome(&model.outcome)?;
    let columns: Vec<&[Option<f64>]> = model.features.iter().map(|f| frame.feature(f)).collect::<Result<_>>()?;
    let mut items = Vec::with_capacity(model.test_ids.len());
    for id in &model.test_ids {
        let i = frame
            .row_ids
            .binary_search(id)
            .map_err(|_| Error::UnmatchedIds(vec![id.clone()]))?;
        let row: Vec<f64> = columns
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c[i].or_else(|| self_fill(model, j))
                    .ok_or_else(|| Error::InvalidInput(format!("held-out row `{id}` lacks `{}`", model.features[j])))
            })
            .collect::<Result<_>>()?;
        items.push((model.predict(&row)?, series.values[i], id.as_str()));
    }
    bucket_curve_from("score", &model.outcome, series.kind, items, bucket_size, 0)
}

fn self_fill(model: &FittedModel, j: usize) -> Option<f64> {
    model.imputation.as_ref().and_then(|f| f.get(j).copied())
}
