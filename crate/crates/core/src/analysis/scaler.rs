use serde::{Deserialize, Serialize};

use crate::corpus::AnalysisFrame;
use crate::error::{Error, Result};

/// Per-feature standardisation learned on training rows, using the
/// population (n-denominator) standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardScaler {
    /// Retained features, aligned with `means` and `stds`.
    pub features: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Features dropped for having zero variance.
    pub dropped: Vec<String>,
}

impl StandardScaler {
    /// Fits on row-major data aligned with `names`. Returns the scaler and the
    /// input column indices it retained.
    pub fn fit(names: &[String], rows: &[Vec<f64>]) -> Result<(Self, Vec<usize>)> {
        if rows.len() < 2 {
            return Err(Error::InvalidInput("a scaler needs at least two rows".into()));
        }
        let n = rows.len() as f64;
        let mut scaler = StandardScaler {
            features: Vec::new(),
            means: Vec::new(),
            stds: Vec::new(),
            dropped: Vec::new(),
        };
        let mut keep = Vec::new();
        for (j, name) in names.iter().enumerate() {
            let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd <= 1e-12 * m.abs().max(1.0) {
                log::warn!("feature `{name}` has zero variance on the fitting rows; dropped");
                scaler.dropped.push(name.clone());
                continue;
            }
            scaler.features.push(name.clone());
            scaler.means.push(m);
            scaler.stds.push(sd);
            keep.push(j);
        }
        Ok((scaler, keep))
    }

    /// Standardises values of the retained features.
    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    pub fn inverse_transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(z, (m, s))| z * s + m)
            .collect()
    }
}

/// Fits a scaler on the given frame rows; every value must be present.
pub fn fit_standard_scaler(frame: &AnalysisFrame, features: &[String], rows: &[usize]) -> Result<StandardScaler> {
    let columns: Vec<&[Option<f64>]> = features.iter().map(|f| frame.feature(f)).collect::<Result<_>>()?;
    let data: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| {
            columns
                .iter()
                .zip(features)
                .map(|(c, name)| {
                    c.get(i)
                        .copied()
                        .flatten()
                        .ok_or_else(|| Error::InvalidInput(format!("`{name}` is missing in row {i}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(StandardScaler::fit(features, &data)?.0)
}
