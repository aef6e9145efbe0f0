//! `analyze`: join characteristics with outcomes and write the report bundle.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use tct_core::analysis::{
    bucket_curve, correlation_matrix, distribution_summary, fit_logistic, fit_random_forest, score_buckets,
    AnalysisReport, FittedModel, ForestParams, LogisticParams,
};
use tct_core::corpus::{attach_outcomes, load_outcomes, AnalysisFrame};
use tct_core::metrics::CharacteristicsTable;
use tct_core::report::{sig6, write_report, ChartSpec, Manifest};

use crate::config::{AnalysisKind, AnalyzeConfig, RunConfig};
use crate::CliError;

pub struct AnalyzeResult {
    pub report: AnalysisReport,
    pub manifest: Manifest,
    pub report_dir: PathBuf,
    /// Human-readable summary for standard output.
    pub summary: String,
}

fn load_frame(a: &AnalyzeConfig) -> Result<AnalysisFrame, CliError> {
    let path = a.characteristics.as_ref().expect("resolved by config loading");
    let file = File::open(path).map_err(|e| CliError::Validation(format!("cannot open {}: {e}", path.display())))?;
    let table = CharacteristicsTable::read_csv(BufReader::new(file), &path.display().to_string())?;
    let outcomes = load_outcomes(&a.outcomes)?;
    let frame = attach_outcomes(&table, &outcomes, &a.derived)?;
    for w in &frame.warnings {
        log::warn!("{w}");
    }
    Ok(frame)
}

fn check_columns(frame: &AnalysisFrame, columns: &[String]) -> Result<(), CliError> {
    let unknown: Vec<&str> = columns
        .iter()
        .filter(|c| !frame.features.contains_key(*c))
        .map(String::as_str)
        .collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("unknown feature columns: {}", unknown.join(", "))))
    }
}

pub fn run_analyze(config: &RunConfig) -> Result<AnalyzeResult, CliError> {
    let a = config.validate_analyze()?;
    log::info!("effective config:\n{}", config.effective_toml());
    let frame = load_frame(a)?;
    log::info!("{} rows joined with outcomes, {} dropped", frame.len(), frame.dropped);

    let outcome = match &a.outcome {
        Some(o) => o.clone(),
        None => frame
            .outcomes
            .keys()
            .next()
            .cloned()
            .ok_or_else(|| CliError::Validation("the outcome file has no outcome columns".into()))?,
    };
    if !frame.outcomes.contains_key(&outcome) && !frame.is_empty() {
        return Err(CliError::Validation(format!("unknown outcome `{outcome}`")));
    }
    let features = a.features.clone().unwrap_or_else(|| frame.feature_names());
    check_columns(&frame, &features)?;
    let bucket_metrics = a.bucket_metrics.clone().unwrap_or_else(|| features.clone());
    check_columns(&frame, &bucket_metrics)?;

    let mut report = AnalysisReport::new(config.seed);
    report.rows = frame.len();
    report.dropped_rows = frame.dropped;
    report.warnings = frame.warnings.clone();
    let mut analyses = a.analyses.clone();
    analyses.sort();
    analyses.dedup();
    for kind in analyses {
        match kind {
            AnalysisKind::Distributions => {
                report.distributions = distribution_summary(&frame, &features)?;
            }
            AnalysisKind::Correlations => {
                if features.len() >= 2 {
                    report.correlations = Some(correlation_matrix(&frame, &features)?);
                } else {
                    log::warn!("correlations need at least two features; skipped");
                }
            }
            AnalysisKind::Buckets => {
                for m in &bucket_metrics {
                    report.bucket_curves.push(bucket_curve(&frame, m, &outcome, config.bucket_size)?);
                }
            }
            AnalysisKind::Logistic => {
                let params = LogisticParams {
                    l2: a.logistic.l2,
                    split_fraction: a.logistic.split_fraction,
                    seed: config.seed,
                    missing: a.missing,
                    ..LogisticParams::default()
                };
                let model = fit_logistic(&frame, &outcome, &features, &params)?;
                push_model(&mut report, model, &frame, config.bucket_size);
            }
            AnalysisKind::Forest => {
                let params = ForestParams {
                    n_trees: a.forest.n_trees,
                    max_depth: a.forest.max_depth,
                    min_leaf: a.forest.min_leaf,
                    features_per_split: a.forest.features_per_split,
                    split_fraction: a.forest.split_fraction,
                    seed: config.seed,
                    missing: a.missing,
                    ..ForestParams::default()
                };
                let model = fit_random_forest(&frame, &outcome, &features, &params)?;
                push_model(&mut report, model, &frame, config.bucket_size);
            }
        }
    }

    let charts = ChartSpec::defaults_for(&report);
    let manifest = write_report(&report, &charts, &a.report_dir)?;
    for f in &manifest.files {
        log::info!("wrote {} ({} bytes, sha256 {})", a.report_dir.join(&f.path).display(), f.bytes, f.sha256);
    }
    let summary = summarize(&report);
    Ok(AnalyzeResult {
        report,
        manifest,
        report_dir: a.report_dir.clone(),
        summary,
    })
}

/// Adds a model and, when the held-out split is large enough, its score buckets.
fn push_model(report: &mut AnalysisReport, model: FittedModel, frame: &AnalysisFrame, bucket_size: usize) {
    let curve = match score_buckets(&model, frame, bucket_size) {
        Ok(curve) => Some(curve),
        Err(e) => {
            let msg = format!("no score buckets for the {:?} model: {e}", model.kind);
            log::warn!("{msg}");
            report.warnings.push(msg);
            None
        }
    };
    report.score_curves.push(curve);
    report.models.push(model);
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), sig6)
}

fn summarize(report: &AnalysisReport) -> String {
    let mut out = format!("rows analysed: {} (dropped {})\n", report.rows, report.dropped_rows);
    for (i, m) in report.models.iter().enumerate() {
        out.push_str(&format!(
            "{:?} model for `{}`: held-out accuracy {}, log-loss {}\n",
            m.kind,
            m.outcome,
            fmt(m.held_out.accuracy),
            fmt(m.held_out.log_loss)
        ));
        if let Some(Some(curve)) = report.score_curves.get(i) {
            let best = curve.points.iter().map(|p| p.outcome_mean).fold(f64::NEG_INFINITY, f64::max);
            let worst = curve.points.iter().map(|p| p.outcome_mean).fold(f64::INFINITY, f64::min);
            out.push_str(&format!(
                "  score buckets: best {} worst {} spread {}\n",
                sig6(best),
                sig6(worst),
                fmt(curve.spread())
            ));
        }
        for (name, v) in m.ranked().into_iter().take(5) {
            out.push_str(&format!("  {name}: {}\n", sig6(v)));
        }
    }
    for c in &report.bucket_curves {
        out.push_str(&format!("bucket curve {}: slope {}, spread {}\n", c.metric, fmt(c.slope()), fmt(c.spread())));
    }
    out
}
