//! Run configuration: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tct_core::analysis::{ForestParams, LogisticParams, MissingPolicy};
use tct_core::corpus::{DatasetFormat, DerivedFeatureSpec, FragmentSpec};
use tct_core::metrics::{MetricParams, WordPropertyDef};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BUCKET_SIZE: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads for `compute`; defaults to the available parallelism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_bucket_size")]
    pub bucket_size: usize,
    pub dataset: DatasetConfig,
    #[serde(rename = "fragment")]
    pub fragments: Vec<FragmentSpec>,
    #[serde(default)]
    pub lexicons: LexiconConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    /// Extra word-property metrics, e.g. a genderedness score.
    #[serde(default, rename = "word_property", skip_serializing_if = "Vec::is_empty")]
    pub word_properties: Vec<WordPropertyDef>,
    #[serde(default)]
    pub compute: ComputeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeConfig>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("tct-out")
}

fn default_bucket_size() -> usize {
    DEFAULT_BUCKET_SIZE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    /// Inferred from the file extension when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<DatasetFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id_field: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconConfig {
    /// Lexicon manifest; the bundled lexicons (or `TCT_DATA_DIR`) otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// Metric keys to compute; all registered metrics when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub select: Option<Vec<String>>,
    #[serde(default = "default_mtld")]
    pub mtld_threshold: f64,
    #[serde(default = "default_hdd")]
    pub hdd_sample_size: usize,
}

fn default_mtld() -> f64 {
    MetricParams::default().mtld_threshold
}

fn default_hdd() -> usize {
    MetricParams::default().hdd_sample_size
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            select: None,
            mtld_threshold: default_mtld(),
            hdd_sample_size: default_hdd(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeConfig {
    /// Output CSV, relative to `out_dir` unless absolute.
    #[serde(default = "default_characteristics")]
    pub output: PathBuf,
    /// Abort on the first record whose computation fails instead of skipping it.
    #[serde(default)]
    pub fail_fast: bool,
}

fn default_characteristics() -> PathBuf {
    PathBuf::from("characteristics.csv")
}

impl Default for ComputeConfig {
    fn default() -> Self {
        ComputeConfig {
            output: default_characteristics(),
            fail_fast: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisKind {
    Distributions,
    Correlations,
    Buckets,
    Logistic,
    Forest,
}

impl AnalysisKind {
    pub const ALL: [AnalysisKind; 5] = [
        AnalysisKind::Distributions,
        AnalysisKind::Correlations,
        AnalysisKind::Buckets,
        AnalysisKind::Logistic,
        AnalysisKind::Forest,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// Characteristics CSV; defaults to the `compute` output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characteristics: Option<PathBuf>,
    pub outcomes: PathBuf,
    /// Outcome column to model; the first one in the file when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(default = "default_analyses")]
    pub analyses: Vec<AnalysisKind>,
    /// Feature columns (`<fragment>.<METRIC>` or derived names); all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<String>>,
    /// Columns for bucket curves; defaults to `features`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket_metrics: Option<Vec<String>>,
    #[serde(default)]
    pub missing: MissingPolicy,
    #[serde(default, rename = "derived", skip_serializing_if = "Vec::is_empty")]
    pub derived: Vec<DerivedFeatureSpec>,
    /// Report directory, relative to `out_dir` unless absolute.
    #[serde(default = "default_report_dir")]
    pub report_dir: PathBuf,
    #[serde(default)]
    pub logistic: LogisticConfig,
    #[serde(default)]
    pub forest: ForestConfig,
}

fn default_analyses() -> Vec<AnalysisKind> {
    AnalysisKind::ALL.to_vec()
}

fn default_report_dir() -> PathBuf {
    PathBuf::from("report")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticConfig {
    #[serde(default = "default_l2")]
    pub l2: f64,
    #[serde(default = "default_split")]
    pub split_fraction: f64,
}

fn default_l2() -> f64 {
    LogisticParams::default().l2
}

fn default_split() -> f64 {
    LogisticParams::default().split_fraction
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: default_l2(),
            split_fraction: default_split(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestConfig {
    #[serde(default = "default_trees")]
    pub n_trees: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(default = "default_min_leaf")]
    pub min_leaf: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features_per_split: Option<usize>,
    #[serde(default = "default_split")]
    pub split_fraction: f64,
}

fn default_trees() -> usize {
    ForestParams::default().n_trees
}

fn default_min_leaf() -> usize {
    ForestParams::default().min_leaf
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: default_trees(),
            max_depth: None,
            min_leaf: default_min_leaf(),
            features_per_split: None,
            split_fraction: default_split(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("invalid config: {e}")))
    }

    /// Reads a config file, resolves relative paths against its directory and
    /// applies overrides. Paths in the result are all absolute or relative to
    /// the current directory, so the effective config can be re-run as is.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = RunConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        config.apply(overrides);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        self.out_dir = resolve(base, &self.out_dir);
        self.dataset.path = resolve(base, &self.dataset.path);
        if let Some(m) = &mut self.lexicons.manifest {
            *m = resolve(base, m);
        }
        self.compute.output = resolve(&self.out_dir, &self.compute.output);
        let out_dir = self.out_dir.clone();
        let output = self.compute.output.clone();
        if let Some(a) = &mut self.analyze {
            a.outcomes = resolve(base, &a.outcomes);
            a.characteristics = Some(match &a.characteristics {
                Some(c) => resolve(base, c),
                None => output,
            });
            a.report_dir = resolve(&out_dir, &a.report_dir);
        }
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(w) = overrides.workers {
            self.workers = Some(w);
        }
        if let Some(s) = overrides.seed {
            self.seed = s;
        }
        if let Some(out) = &overrides.out_dir {
            // Outputs that followed the old directory follow the new one.
            let old = std::mem::replace(&mut self.out_dir, out.clone());
            let rebase = |p: &mut PathBuf| {
                if let Ok(rel) = p.strip_prefix(&old) {
                    *p = out.join(rel);
                }
            };
            rebase(&mut self.compute.output);
            if let Some(a) = &mut self.analyze {
                rebase(&mut a.report_dir);
                if let Some(c) = &mut a.characteristics {
                    rebase(c);
                }
            }
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn dataset_format(&self) -> DatasetFormat {
        self.dataset
            .format
            .unwrap_or_else(|| DatasetFormat::from_path(&self.dataset.path))
    }

    pub fn metric_params(&self) -> MetricParams {
        MetricParams {
            mtld_threshold: self.metrics.mtld_threshold,
            hdd_sample_size: self.metrics.hdd_sample_size,
        }
    }

    fn validate_common(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Validation(m));
        if self.seed == 0 {
            return fail("seed must be positive".into());
        }
        if self.bucket_size == 0 {
            return fail("bucket_size must be positive".into());
        }
        if self.workers == Some(0) {
            return fail("workers must be positive".into());
        }
        if !(self.metrics.mtld_threshold > 0.0 && self.metrics.mtld_threshold < 1.0) {
            return fail("metrics.mtld_threshold must lie in (0, 1)".into());
        }
        if self.metrics.hdd_sample_size == 0 {
            return fail("metrics.hdd_sample_size must be positive".into());
        }
        if let Some(m) = &self.lexicons.manifest {
            if !m.is_file() {
                return fail(format!("lexicon manifest {} does not exist", m.display()));
            }
        }
        tct_core::corpus::validate_specs(&self.fragments).map_err(CliError::from)
    }

    pub fn validate_compute(&self) -> Result<(), CliError> {
        self.validate_common()?;
        if !self.dataset.path.is_file() {
            return Err(CliError::Validation(format!(
                "dataset {} does not exist",
                self.dataset.path.display()
            )));
        }
        Ok(())
    }

    pub fn validate_analyze(&self) -> Result<&AnalyzeConfig, CliError> {
        self.validate_common()?;
        let a = self
            .analyze
            .as_ref()
            .ok_or_else(|| CliError::Validation("config has no [analyze] section".into()))?;
        for p in [a.characteristics.as_ref().expect("resolved"), &a.outcomes] {
            if !p.is_file() {
                return Err(CliError::Validation(format!("{} does not exist", p.display())));
            }
        }
        if a.analyses.is_empty() {
            return Err(CliError::Validation("analyze.analyses is empty".into()));
        }
        for (what, f) in [("logistic", a.logistic.split_fraction), ("forest", a.forest.split_fraction)] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(CliError::Validation(format!("{what}.split_fraction must lie in (0, 1]")));
            }
        }
        if a.forest.n_trees == 0 || a.forest.min_leaf == 0 {
            return Err(CliError::Validation("forest.n_trees and forest.min_leaf must be positive".into()));
        }
        Ok(a)
    }

    /// The config with defaults filled in, as TOML.
    pub fn effective_toml(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("# could not serialise config: {e}\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[dataset]
path = "data.jsonl"

[[fragment]]
name = "text"
fields = ["text"]
"#;

    #[test]
    fn defaults_and_round_trip() {
        let mut c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.bucket_size, 100);
        c.resolve_paths(Path::new("/base"));
        assert_eq!(c.dataset.path, Path::new("/base/data.jsonl"));
        assert_eq!(c.compute.output, Path::new("/base/tct-out/characteristics.csv"));
        let again = RunConfig::parse(&c.effective_toml()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::parse(MINIMAL).unwrap();
        c.resolve_paths(Path::new("/base"));
        c.apply(&Overrides {
            workers: Some(3),
            seed: Some(9),
            out_dir: Some(PathBuf::from("/elsewhere")),
        });
        assert_eq!((c.workers(), c.seed), (3, 9));
        assert_eq!(c.compute.output, Path::new("/elsewhere/characteristics.csv"));
    }

    #[test]
    fn rejects_unknown_keys_and_zero_seed() {
        assert!(RunConfig::parse(&format!("bogus = 1\n{MINIMAL}")).is_err());
        let c = RunConfig::parse(&format!("seed = 0\n{MINIMAL}")).unwrap();
        assert!(matches!(c.validate_common(), Err(CliError::Validation(_))));
    }
}
