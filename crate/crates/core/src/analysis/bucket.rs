use serde::{Deserialize, Serialize};

use crate::corpus::{AnalysisFrame, OutcomeKind};
use crate::error::{Error, Result};
use crate::stats::{mean, sample_std};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketPoint {
    pub metric_mean: f64,
    pub outcome_mean: f64,
    /// Standard error of `outcome_mean`: √(p(1−p)/n) for binary outcomes,
    /// s/√n for continuous ones.
    pub outcome_se: Option<f64>,
    pub n: usize,
}

/// Outcome averaged over groups of rows sorted by a metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketCurve {
    pub metric: String,
    pub outcome: String,
    pub bucket_size: usize,
    /// Rows left out because the metric was missing.
    pub dropped: usize,
    pub points: Vec<BucketPoint>,
}

impl BucketCurve {
    /// Ordinary least-squares slope of bucket outcome means on bucket metric means.
    pub fn slope(&self) -> Option<f64> {
        let xs: Vec<f64> = self.points.iter().map(|p| p.metric_mean).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p.outcome_mean).collect();
        ols_slope(&xs, &ys)
    }

    /// Outcome mean of the top bucket minus that of the bottom bucket.
    pub fn spread(&self) -> Option<f64> {
        Some(self.points.last()?.outcome_mean - self.points.first()?.outcome_mean)
    }
}

pub(crate) fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Buckets `(metric value, outcome, record id)` triples.
///
/// Rows are sorted by value, ties by id. A trailing partial bucket is kept
/// when it holds at least half a bucket and merged into its predecessor
/// otherwise.
pub fn bucket_curve_from(
    metric: &str,
    outcome: &str,
    kind: OutcomeKind,
    mut items: Vec<(f64, f64, &str)>,
    bucket_size: usize,
    dropped: usize,
) -> Result<BucketCurve> {
    if bucket_size == 0 {
        return Err(Error::InvalidInput("bucket size must be positive".into()));
    }
    if items.len() < bucket_size {
        return Err(Error::TooFewRows {
            rows: items.len(),
            bucket_size,
        });
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.2.cmp(b.2)));
    let full = items.len() / bucket_size;
    let rest = items.len() % bucket_size;
    let mut bounds: Vec<(usize, usize)> = (0..full).map(|i| (i * bucket_size, (i + 1) * bucket_size)).collect();
    if rest > 0 {
        if rest * 2 >= bucket_size {
            bounds.push((full * bucket_size, items.len()));
        } else if let Some(last) = bounds.last_mut() {
            last.1 = items.len();
        }
    }
    let points = bounds
        .into_iter()
        .map(|(lo, hi)| {
            let chunk = &items[lo..hi];
            let n = chunk.len();
            let metric_mean = chunk.iter().map(|r| r.0).sum::<f64>() / n as f64;
            let outcomes: Vec<f64> = chunk.iter().map(|r| r.1).collect();
            let outcome_mean = outcomes.iter().sum::<f64>() / n as f64;
            let outcome_se = match kind {
                OutcomeKind::Binary => Some((outcome_mean * (1.0 - outcome_mean) / n as f64).max(0.0).sqrt()),
                OutcomeKind::Continuous => sample_std(&outcomes).map(|s| s / (n as f64).sqrt()),
            };
            BucketPoint {
                metric_mean,
                outcome_mean,
                outcome_se,
                n,
            }
        })
        .collect();
    Ok(BucketCurve {
        metric: metric.to_string(),
        outcome: outcome.to_string(),
        bucket_size,
        dropped,
        points,
    })
}

/// Bucket curve of `outcome` over the feature column `metric`; rows with a
/// missing metric are dropped and counted.
pub fn bucket_curve(frame: &AnalysisFrame, metric: &str, outcome: &str, bucket_size: usize) -> Result<BucketCurve> {
    let values = frame.feature(metric)?;
    let series = frame.outcome(outcome)?;
    let items: Vec<(f64, f64, &str)> = values
        .iter()
        .zip(&series.values)
        .zip(&frame.row_ids)
        .filter_map(|((v, &y), id)| Some(((*v)?, y, id.as_str())))
        .collect();
    let dropped = frame.len() - items.len();
    if dropped > 0 {
        log::info!("bucket curve {metric}: {dropped} rows without a value dropped");
    }
    bucket_curve_from(metric, outcome, series.kind, items, bucket_size, dropped)
}
