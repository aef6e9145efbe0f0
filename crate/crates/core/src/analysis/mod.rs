//! Statistics that relate characteristics to outcomes.
//!
//! Every function reads an [`AnalysisFrame`](crate::corpus::AnalysisFrame),
//! whose rows are sorted by record id, so results depend only on the data
//! and the seed.

mod bucket;
mod correlation;
mod forest;
mod logistic;
mod model;
mod report;
mod scaler;
mod summary;

pub use bucket::{bucket_curve, bucket_curve_from, BucketCurve, BucketPoint};
pub use correlation::{correlation_matrix, pearson, CorrelationMatrix};
pub use forest::{fit_random_forest, ForestParams};
pub use logistic::{
    fit_logistic, irls, penalized_gradient, penalized_log_likelihood, IrlsFit, LogisticParams,
};
pub use model::{score_buckets, FittedModel, HeldOut, ModelKind, TrainingInfo};
pub use report::{AnalysisReport, REPORT_VERSION};
pub use scaler::{fit_standard_scaler, StandardScaler};
pub use summary::{distribution_summary, DistributionSummary, Histogram, HISTOGRAM_BINS};

use serde::{Deserialize, Serialize};

use crate::corpus::AnalysisFrame;
use crate::error::{Error, Result};

/// What to do with rows that lack a feature value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Drop any row with a missing feature.
    #[default]
    Listwise,
    /// Replace missing values by the column mean over all frame rows.
    MeanImpute,
}

/// Rows usable by a model: complete feature vectors plus the outcome.
pub(crate) struct Design {
    pub features: Vec<String>,
    /// Frame row index of each design row.
    pub rows: Vec<usize>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub dropped: usize,
    /// Fill value per feature under mean imputation.
    pub fill: Option<Vec<f64>>,
}

pub(crate) fn binary_design(
    frame: &AnalysisFrame,
    outcome: &str,
    features: &[String],
    policy: MissingPolicy,
) -> Result<Design> {
    let series = frame.outcome(outcome)?;
    if series.kind != crate::corpus::OutcomeKind::Binary {
        return Err(Error::InvalidInput(format!("outcome `{outcome}` is not binary")));
    }
    if features.is_empty() {
        return Err(Error::NoFeatures);
    }
    let mut columns = Vec::with_capacity(features.len());
    let mut kept = Vec::with_capacity(features.len());
    let mut fill = Vec::new();
    for name in features {
        let col = frame.feature(name)?;
        match policy {
            MissingPolicy::Listwise => columns.push(col.to_vec()),
            MissingPolicy::MeanImpute => {
                let present: Vec<f64> = col.iter().flatten().copied().collect();
                // A column with no values at all cannot be imputed.
                let Some(m) = crate::stats::mean(&present) else {
                    log::warn!("feature `{name}` has no values; skipped");
                    continue;
                };
                columns.push(col.iter().map(|v| Some(v.unwrap_or(m))).collect());
                fill.push(m);
            }
        }
        kept.push(name.clone());
    }
    if kept.is_empty() {
        return Err(Error::NoFeatures);
    }
    let mut design = Design {
        features: kept,
        rows: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
        dropped: 0,
        fill: (policy == MissingPolicy::MeanImpute).then_some(fill),
    };
    for i in 0..frame.len() {
        let row: Option<Vec<f64>> = columns.iter().map(|c| c[i]).collect();
        match row {
            Some(r) => {
                design.rows.push(i);
                design.x.push(r);
                design.y.push(series.values[i]);
            }
            None => design.dropped += 1,
        }
    }
    Ok(design)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean binary cross-entropy with probabilities clamped away from 0 and 1.
pub(crate) fn log_loss(probs: &[f64], y: &[f64]) -> Option<f64> {
    if probs.is_empty() {
        return None;
    }
    let eps = 1e-15;
    let total: f64 = probs
        .iter()
        .zip(y)
        .map(|(&p, &t)| {
            let p = p.clamp(eps, 1.0 - eps);
            -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
        })
        .sum();
    Some(total / probs.len() as f64)
}

pub(crate) fn accuracy(probs: &[f64], y: &[f64]) -> Option<f64> {
    if probs.is_empty() {
        return None;
    }
    let hits = probs
        .iter()
        .zip(y)
        .filter(|(&p, &t)| (p > 0.5) == (t == 1.0))
        .count();
    Some(hits as f64 / probs.len() as f64)
}

/// Deterministic train/test split of `n` items: shuffles indices with a
/// seeded ChaCha stream and takes the first `round(fraction·n)` for training.
pub(crate) fn split_indices(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let n_train = ((fraction * n as f64).round() as usize).min(n);
    let test = idx.split_off(n_train);
    (idx, test)
}

pub(crate) fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("split fraction {fraction} must lie in (0, 1]")))
    }
}

pub(crate) fn check_two_classes(y: &[f64]) -> Result<()> {
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        Err(Error::SingleClass)
    } else {
        Ok(())
    }
}
