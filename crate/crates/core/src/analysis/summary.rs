use serde::{Deserialize, Serialize};

use crate::corpus::AnalysisFrame;
use crate::error::Result;
use crate::stats::{mean, quantile_sorted, sample_std};

pub const HISTOGRAM_BINS: usize = 30;

/// Equal-width histogram; `edges` has one more entry than `counts`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// `None` for empty input. A constant column gets a unit-wide range
    /// centred on its value so it still has well-formed edges.
    pub fn new(values: &[f64], bins: usize) -> Option<Self> {
        let (lo, hi) = min_max(values)?;
        let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins)
            .map(|i| if i == bins { hi } else { lo + width * i as f64 })
            .collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let b = (((v - lo) / width).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        Some(Histogram { edges, counts })
    }
}

fn min_max(values: &[f64]) -> Option<(f64, f64)> {
    let first = *values.first()?;
    Some(values.iter().fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub column: String,
    pub count: usize,
    pub missing: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation; zero for a constant column.
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub q25: Option<f64>,
    pub median: Option<f64>,
    pub q75: Option<f64>,
    pub max: Option<f64>,
    pub histogram: Option<Histogram>,
}

impl DistributionSummary {
    pub fn of(column: &str, values: &[Option<f64>]) -> Self {
        let mut present: Vec<f64> = values.iter().flatten().copied().collect();
        present.sort_by(f64::total_cmp);
        let std = match present.len() {
            0 => None,
            1 => Some(0.0),
            _ => sample_std(&present),
        };
        DistributionSummary {
            column: column.to_string(),
            count: present.len(),
            missing: values.len() - present.len(),
            mean: mean(&present),
            std,
            min: present.first().copied(),
            q25: quantile_sorted(&present, 0.25),
            median: quantile_sorted(&present, 0.5),
            q75: quantile_sorted(&present, 0.75),
            max: present.last().copied(),
            histogram: Histogram::new(&present, HISTOGRAM_BINS),
        }
    }
}

/// Summaries of the named feature columns, in the order given.
pub fn distribution_summary(frame: &AnalysisFrame, columns: &[String]) -> Result<Vec<DistributionSummary>> {
    columns
        .iter()
        .map(|c| Ok(DistributionSummary::of(c, frame.feature(c)?)))
        .collect()
}
