use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::model::{FittedModel, HeldOut, ModelKind, TrainingInfo};
use super::{accuracy, binary_design, check_fraction, check_two_classes, log_loss, sigmoid, split_indices, MissingPolicy};
use super::scaler::StandardScaler;
use crate::corpus::AnalysisFrame;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticParams {
    /// Ridge strength λ on the standardised coefficients (not the intercept).
    pub l2: f64,
    pub split_fraction: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub tolerance: f64,
    pub missing: MissingPolicy,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1.0,
            split_fraction: 0.8,
            seed: 0,
            max_iter: 100,
            tolerance: 1e-8,
            missing: MissingPolicy::Listwise,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrlsFit {
    /// Intercept first, then one weight per column of `x`.
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(w: &[f64], row: &[f64]) -> f64 {
    w[0] + row.iter().zip(&w[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// Σ log-likelihood − (λ/2)·‖w‖², intercept excluded from the penalty.
pub fn penalized_log_likelihood(x: &[Vec<f64>], y: &[f64], w: &[f64], lambda: f64) -> f64 {
    let ll: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &t)| {
            let z = linear(w, row);
            -(t * softplus(-z) + (1.0 - t) * softplus(z))
        })
        .sum();
    ll - 0.5 * lambda * w[1..].iter().map(|v| v * v).sum::<f64>()
}

/// Gradient of [`penalized_log_likelihood`] with respect to `w`.
pub fn penalized_gradient(x: &[Vec<f64>], y: &[f64], w: &[f64], lambda: f64) -> Vec<f64> {
    let mut g = vec![0.0; w.len()];
    for (row, &t) in x.iter().zip(y) {
        let r = t - sigmoid(linear(w, row));
        g[0] += r;
        for (gj, xj) in g[1..].iter_mut().zip(row) {
            *gj += r * xj;
        }
    }
    for (gj, wj) in g[1..].iter_mut().zip(&w[1..]) {
        *gj -= lambda * wj;
    }
    g
}

/// Maximises the penalised log-likelihood by Newton steps (iteratively
/// reweighted least squares), halving a step whenever it would lower the
/// objective. Stops once the largest update is below `tolerance`.
pub fn irls(x: &[Vec<f64>], y: &[f64], lambda: f64, max_iter: usize, tolerance: f64) -> Result<IrlsFit> {
    let d = x.first().map_or(0, Vec::len) + 1;
    let mut w = vec![0.0; d];
    let mut objective = penalized_log_likelihood(x, y, &w, lambda);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let g = penalized_gradient(x, y, &w, lambda);
        let mut h = DMatrix::<f64>::zeros(d, d);
        for row in x {
            let p = sigmoid(linear(&w, row));
            let s = p * (1.0 - p);
            let xi: Vec<f64> = std::iter::once(1.0).chain(row.iter().copied()).collect();
            for a in 0..d {
                let sa = s * xi[a];
                for b in a..d {
                    h[(a, b)] += sa * xi[b];
                }
            }
        }
        for a in 0..d {
            if a > 0 {
                h[(a, a)] += lambda;
            }
            for b in 0..a {
                h[(a, b)] = h[(b, a)];
            }
        }
        let gv = DVector::from_vec(g);
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&gv),
            None => h
                .lu()
                .solve(&gv)
                .ok_or_else(|| Error::Numerical("singular Hessian in logistic fit".into()))?,
        };
        let mut scale = 1.0;
        let mut candidate;
        loop {
            candidate = w.iter().zip(step.iter()).map(|(a, b)| a + scale * b).collect::<Vec<_>>();
            let obj = penalized_log_likelihood(x, y, &candidate, lambda);
            if obj >= objective || scale < 1e-10 {
                objective = obj.max(objective);
                break;
            }
            scale *= 0.5;
        }
        let delta = w
            .iter()
            .zip(&candidate)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        w = candidate;
        if !delta.is_finite() {
            return Err(Error::Numerical("logistic fit diverged".into()));
        }
        if delta < tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("logistic fit stopped after {iterations} iterations without converging");
    }
    Ok(IrlsFit {
        weights: w,
        iterations,
        converged,
    })
}

/// Standardised, L2-regularised logistic regression with a seeded hold-out split.
pub fn fit_logistic(
    frame: &AnalysisFrame,
    outcome: &str,
    features: &[String],
    params: &LogisticParams,
) -> Result<FittedModel> {
    check_fraction(params.split_fraction)?;
    if !(params.l2 >= 0.0) {
        return Err(Error::InvalidInput("l2 strength must be non-negative".into()));
    }
    let design = binary_design(frame, outcome, features, params.missing)?;
    if design.dropped > 0 {
        log::info!("logistic fit: {} rows with missing features dropped", design.dropped);
    }
    let (train, test) = split_indices(design.x.len(), params.split_fraction, params.seed);
    let y_train: Vec<f64> = train.iter().map(|&i| design.y[i]).collect();
    check_two_classes(&y_train)?;
    let raw_train: Vec<Vec<f64>> = train.iter().map(|&i| design.x[i].clone()).collect();
    let (scaler, keep) = StandardScaler::fit(&design.features, &raw_train)?;
    if keep.is_empty() {
        return Err(Error::NoFeatures);
    }
    let prepare = |i: usize| -> Vec<f64> {
        let row: Vec<f64> = keep.iter().map(|&j| design.x[i][j]).collect();
        scaler.transform(&row)
    };
    let x_train: Vec<Vec<f64>> = train.iter().map(|&i| prepare(i)).collect();
    let fit = irls(&x_train, &y_train, params.l2, params.max_iter, params.tolerance)?;

    let probs: Vec<f64> = test.iter().map(|&i| sigmoid(linear(&fit.weights, &prepare(i)))).collect();
    let y_test: Vec<f64> = test.iter().map(|&i| design.y[i]).collect();
    let mut test_ids: Vec<String> = test.iter().map(|&i| frame.row_ids[design.rows[i]].clone()).collect();
    test_ids.sort();

    Ok(FittedModel {
        kind: ModelKind::Logistic,
        outcome: outcome.to_string(),
        features: scaler.features.clone(),
        coefficients: fit.weights[1..].to_vec(),
        importances: Vec::new(),
        intercept: Some(fit.weights[0]),
        imputation: design.fill.map(|fill| keep.iter().map(|&j| fill[j]).collect()),
        scaler: Some(scaler),
        training: TrainingInfo {
            seed: params.seed,
            split_fraction: params.split_fraction,
            train_rows: train.len(),
            test_rows: test.len(),
            dropped_rows: design.dropped,
            missing: params.missing,
            iterations: Some(fit.iterations),
            converged: Some(fit.converged),
            l2_strength: Some(params.l2),
            ..TrainingInfo::default()
        },
        held_out: HeldOut {
            accuracy: accuracy(&probs, &y_test),
            log_loss: log_loss(&probs, &y_test),
        },
        test_ids,
        trees: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_vanishes_at_optimum() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 - 20.0) / 10.0, ((i * 7) % 5) as f64]).collect();
        let y: Vec<f64> = (0..40).map(|i| f64::from(u8::from((i * 13) % 7 < 3 + i / 10))).collect();
        let fit = irls(&x, &y, 1.0, 100, 1e-10).unwrap();
        assert!(fit.converged);
        let g = penalized_gradient(&x, &y, &fit.weights, 1.0);
        assert!(g.iter().all(|v| v.abs() < 1e-8), "{g:?}");
    }

    #[test]
    fn strong_ridge_shrinks() {
        let x: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 / 10.0 - 2.5]).collect();
        let y: Vec<f64> = (0..50).map(|i| f64::from(u8::from(i >= 25))).collect();
        let fit = irls(&x, &y, 1e6, 100, 1e-10).unwrap();
        assert!(fit.weights[1].abs() < 0.01);
    }
}
