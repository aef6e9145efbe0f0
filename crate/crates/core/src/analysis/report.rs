use serde::{Deserialize, Serialize};

use super::bucket::BucketCurve;
use super::correlation::CorrelationMatrix;
use super::model::FittedModel;
use super::summary::DistributionSummary;
use crate::error::Result;

pub const REPORT_VERSION: &str = "tct-report/1";

/// Everything an analysis run produced; enough to redraw every chart.
/// Sections that were not requested are left out of the JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: String,
    pub seed: u64,
    /// Rows in the joined frame.
    pub rows: usize,
    /// Records dropped during the join for lacking outcomes.
    pub dropped_rows: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub distributions: Vec<DistributionSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlations: Option<CorrelationMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bucket_curves: Vec<BucketCurve>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub models: Vec<FittedModel>,
    /// Held-out score buckets aligned with `models`; `None` when a model's
    /// held-out split was too small for one bucket.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub score_curves: Vec<Option<BucketCurve>>,
}

impl AnalysisReport {
    pub fn new(seed: u64) -> Self {
        AnalysisReport {
            version: REPORT_VERSION.to_string(),
            seed,
            rows: 0,
            dropped_rows: 0,
            warnings: Vec::new(),
            distributions: Vec::new(),
            correlations: None,
            bucket_curves: Vec::new(),
            models: Vec::new(),
            score_curves: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
