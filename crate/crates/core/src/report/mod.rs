//! SVG charts and the on-disk report bundle.
//!
//! Rendering is a pure function of an [`AnalysisReport`]; numbers are printed
//! with fixed rules so the same report always yields the same bytes.

mod format;
mod svg;

pub use format::sig6;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{AnalysisReport, ModelKind};
use crate::error::{Error, Result};
use svg::Canvas;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Histogram,
    Heatmap,
    BucketCurve,
    CoefficientBars,
}

impl ChartKind {
    fn slug(self) -> &'static str {
        match self {
            ChartKind::Histogram => "histogram",
            ChartKind::Heatmap => "heatmap",
            ChartKind::BucketCurve => "bucket-curve",
            ChartKind::CoefficientBars => "coefficients",
        }
    }
}

/// Which part of the report a chart draws.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "section", rename_all = "snake_case")]
pub enum DataRef {
    Distribution { column: String },
    Correlations,
    BucketCurve { index: usize },
    ScoreCurve { index: usize },
    Model { index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub title: String,
    pub data: DataRef,
    #[serde(default = "default_width")]
    pub width: u32,
    #[serde(default = "default_height")]
    pub height: u32,
}

fn default_width() -> u32 {
    640
}

fn default_height() -> u32 {
    480
}

impl ChartSpec {
    pub fn new(kind: ChartKind, title: &str, data: DataRef) -> Self {
        ChartSpec {
            kind,
            title: title.to_string(),
            data,
            width: default_width(),
            height: default_height(),
        }
    }

    /// One chart per report section entry, in report order.
    pub fn defaults_for(report: &AnalysisReport) -> Vec<ChartSpec> {
        let mut out = Vec::new();
        for d in &report.distributions {
            if d.histogram.is_some() {
                out.push(ChartSpec::new(
                    ChartKind::Histogram,
                    &format!("Distribution of {}", d.column),
                    DataRef::Distribution { column: d.column.clone() },
                ));
            }
        }
        if report.correlations.is_some() {
            out.push(ChartSpec::new(ChartKind::Heatmap, "Pearson correlations", DataRef::Correlations));
        }
        for (index, c) in report.bucket_curves.iter().enumerate() {
            out.push(ChartSpec::new(
                ChartKind::BucketCurve,
                &format!("{} by {}", c.outcome, c.metric),
                DataRef::BucketCurve { index },
            ));
        }
        for (index, m) in report.models.iter().enumerate() {
            let (what, name) = match m.kind {
                ModelKind::Logistic => ("coefficients", "logistic regression"),
                ModelKind::RandomForest => ("importances", "random forest"),
            };
            out.push(ChartSpec::new(
                ChartKind::CoefficientBars,
                &format!("{name} {what} for {}", m.outcome),
                DataRef::Model { index },
            ));
            if report.score_curves.get(index).is_some_and(Option::is_some) {
                out.push(ChartSpec::new(
                    ChartKind::BucketCurve,
                    &format!("{} by held-out {name} score", m.outcome),
                    DataRef::ScoreCurve { index },
                ));
            }
        }
        out
    }
}

fn dangling(spec: &ChartSpec) -> Error {
    Error::InvalidInput(format!("chart `{}` refers to missing data {:?}", spec.title, spec.data))
}

/// Renders one chart as a standalone SVG document.
pub fn render_chart(spec: &ChartSpec, report: &AnalysisReport) -> Result<String> {
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::InvalidInput(format!("chart `{}` has zero size", spec.title)));
    }
    let mut canvas = Canvas::new(spec.width, spec.height, &spec.title);
    match (spec.kind, &spec.data) {
        (ChartKind::Histogram, DataRef::Distribution { column }) => {
            let summary = report
                .distributions
                .iter()
                .find(|d| &d.column == column)
                .ok_or_else(|| dangling(spec))?;
            let hist = summary
                .histogram
                .as_ref()
                .ok_or_else(|| Error::InvalidInput(format!("column `{column}` has no values to plot")))?;
            svg::histogram(&mut canvas, column, hist);
        }
        (ChartKind::Heatmap, DataRef::Correlations) => {
            let m = report.correlations.as_ref().ok_or_else(|| dangling(spec))?;
            svg::heatmap(&mut canvas, m);
        }
        (ChartKind::BucketCurve, DataRef::BucketCurve { index }) => {
            let c = report.bucket_curves.get(*index).ok_or_else(|| dangling(spec))?;
            svg::bucket_curve(&mut canvas, c);
        }
        (ChartKind::BucketCurve, DataRef::ScoreCurve { index }) => {
            let c = report
                .score_curves
                .get(*index)
                .and_then(Option::as_ref)
                .ok_or_else(|| dangling(spec))?;
            svg::bucket_curve(&mut canvas, c);
        }
        (ChartKind::CoefficientBars, DataRef::Model { index }) => {
            let m = report.models.get(*index).ok_or_else(|| dangling(spec))?;
            let ranked = m.ranked();
            if ranked.is_empty() {
                return Err(Error::InvalidInput(format!("chart `{}` has no coefficients to draw", spec.title)));
            }
            let label = match m.kind {
                ModelKind::Logistic => "standardised coefficient",
                ModelKind::RandomForest => "impurity importance",
            };
            svg::coefficient_bars(&mut canvas, &ranked, label);
        }
        (kind, data) => {
            return Err(Error::InvalidInput(format!("a {kind:?} chart cannot draw {data:?}")));
        }
    }
    Ok(canvas.finish())
}

/// One written file with its SHA-256.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    fn write(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        let path: PathBuf = dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(ManifestEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(contents.as_bytes())),
            bytes: contents.len(),
        });
        Ok(())
    }
}

fn chart_file(i: usize, spec: &ChartSpec) -> String {
    format!("chart-{:02}-{}.svg", i + 1, spec.kind.slug())
}

/// Writes `report.json`, one SVG per chart, and an `index.html` that embeds
/// every chart inline. All charts are rendered before anything is written.
pub fn write_report(report: &AnalysisReport, charts: &[ChartSpec], out_dir: &Path) -> Result<Manifest> {
    let rendered: Vec<String> = charts.iter().map(|c| render_chart(c, report)).collect::<Result<_>>()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut manifest = Manifest::default();
    manifest.write(out_dir, "report.json", &report.to_json()?)?;
    let mut html = String::from(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Text characteristics report</title>\n<style>body{font-family:sans-serif;margin:2em;} figure{margin:0 0 2em 0;}</style>\n</head>\n<body>\n<h1>Text characteristics report</h1>\n",
    );
    html.push_str(&format!(
        "<p>{} rows analysed, {} dropped, seed {}. Full results: <a href=\"report.json\">report.json</a>.</p>\n",
        report.rows, report.dropped_rows, report.seed
    ));
    for (i, (spec, svg)) in charts.iter().zip(&rendered).enumerate() {
        let name = chart_file(i, spec);
        manifest.write(out_dir, &name, svg)?;
        let inline = svg.split_once("?>\n").map_or(svg.as_str(), |(_, rest)| rest);
        html.push_str(&format!(
            "<figure id=\"chart-{:02}\">\n<h2>{}</h2>\n{inline}<figcaption><a href=\"{name}\">{name}</a></figcaption>\n</figure>\n",
            i + 1,
            format::escape(&spec.title)
        ));
    }
    html.push_str("</body>\n</html>\n");
    manifest.write(out_dir, "index.html", &html)?;
    Ok(manifest)
}
