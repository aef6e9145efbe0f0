//! `compute`: stream a dataset through the metric pipeline into a CSV.
//!
//! A reader thread feeds records to a pool of workers over a bounded queue;
//! the calling thread collects results, restores input order, and writes
//! rows as soon as they are next in line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use crossbeam_channel::bounded;
use tct_core::corpus::{DatasetReader, Record};
use tct_core::lexicons::Lexicons;
use tct_core::metrics::{CharacteristicsTable, MetricRegistry, MetricSet, MetricSpec, Selection, TableRow};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComputeSummary {
    pub output: PathBuf,
    pub records: usize,
    pub fragments: usize,
    pub skipped: Vec<String>,
    pub seconds: f64,
    /// Missing cells per metric key.
    pub missing: BTreeMap<String, usize>,
    /// Mean coverage per word-property metric over the fragments that had one.
    pub coverage: BTreeMap<String, f64>,
}

pub fn load_lexicons(config: &RunConfig) -> Result<Lexicons, CliError> {
    let lex = match &config.lexicons.manifest {
        Some(path) => {
            log::info!("lexicons from {}", path.display());
            Lexicons::from_manifest(path)?
        }
        None => {
            match std::env::var_os(tct_core::lexicons::DATA_DIR_ENV) {
                Some(dir) if !dir.is_empty() => log::info!("lexicons from {}", PathBuf::from(dir).display()),
                _ => log::info!("using bundled lexicons"),
            }
            Lexicons::from_env()?
        }
    };
    log::info!("loaded {}", lex.summary());
    Ok(lex)
}

/// Registry with the built-ins plus the configured word-property metrics.
pub fn build_metrics(config: &RunConfig, lexicons: &Lexicons) -> Result<MetricSet, CliError> {
    let mut registry = MetricRegistry::with_params(config.metric_params());
    for def in &config.word_properties {
        registry.register(MetricSpec::word_property(def.clone()))?;
    }
    let selection = match &config.metrics.select {
        Some(keys) => Selection::Keys(keys.clone()),
        None => Selection::All,
    };
    Ok(registry.initialize(lexicons, &selection)?)
}

enum Outcome {
    Rows(Vec<TableRow>),
    Failed { id: String, message: String },
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".to_string())
}

fn compute_record(metrics: &MetricSet, record: Record) -> Outcome {
    let id = record.id.clone();
    let result = catch_unwind(AssertUnwindSafe(|| {
        record
            .fragments
            .iter()
            .map(|(name, text)| TableRow {
                record_id: record.id.clone(),
                fragment: name.clone(),
                cells: metrics.compute_text(text),
            })
            .collect::<Vec<_>>()
    }));
    match result {
        Ok(rows) => Outcome::Rows(rows),
        Err(payload) => Outcome::Failed {
            id,
            message: panic_message(payload),
        },
    }
}

pub fn run_compute(config: &RunConfig) -> Result<ComputeSummary, CliError> {
    config.validate_compute()?;
    log::info!("effective config:\n{}", config.effective_toml());
    let started = Instant::now();
    let lexicons = load_lexicons(config)?;
    let metrics = Arc::new(build_metrics(config, &lexicons)?);
    let workers = config.workers();
    log::info!("computing {} metrics with {workers} workers", metrics.keys().len());

    let reader = DatasetReader::open(
        &config.dataset.path,
        config.dataset_format(),
        &config.fragments,
        config.dataset.id_field.as_deref(),
    )?;
    let output = config.compute.output.clone();
    if let Some(dir) = output.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
    }
    let file = File::create(&output)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", output.display())))?;
    let mut csv = csv::Writer::from_writer(BufWriter::new(file));
    let keys = metrics.keys().to_vec();
    csv.write_record(CharacteristicsTable::csv_header(&keys))?;

    let (job_tx, job_rx) = bounded::<(usize, Record)>(workers * 4);
    let (done_tx, done_rx) = bounded::<(usize, Outcome)>(workers * 4);
    let fail_fast = config.compute.fail_fast;

    let mut summary = ComputeSummary {
        output: output.clone(),
        ..ComputeSummary::default()
    };
    let mut coverage_sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();

    let read_result = std::thread::scope(|scope| -> Result<Result<(), CliError>, CliError> {
        let producer = scope.spawn(move || -> Result<usize, CliError> {
            let mut n = 0;
            for (index, record) in reader.enumerate() {
                if job_tx.send((index, record?)).is_err() {
                    break;
                }
                n += 1;
            }
            Ok(n)
        });
        for _ in 0..workers {
            let rx = job_rx.clone();
            let tx = done_tx.clone();
            let metrics = Arc::clone(&metrics);
            scope.spawn(move || {
                for (index, record) in rx {
                    if tx.send((index, compute_record(&metrics, record))).is_err() {
                        break;
                    }
                }
            });
        }
        drop(job_rx);
        drop(done_tx);

        let mut pending: BTreeMap<usize, Outcome> = BTreeMap::new();
        let mut next = 0usize;
        let mut failure: Option<CliError> = None;
        let mut last_log = Instant::now();
        for (index, outcome) in done_rx.iter() {
            if failure.is_some() {
                continue;
            }
            pending.insert(index, outcome);
            while let Some(outcome) = pending.remove(&next) {
                next += 1;
                match outcome {
                    Outcome::Rows(rows) => {
                        summary.records += 1;
                        for row in rows {
                            summary.fragments += 1;
                            for (key, cell) in keys.iter().zip(&row.cells) {
                                if cell.value.is_none() {
                                    *summary.missing.entry(key.clone()).or_default() += 1;
                                }
                                if let Some(c) = cell.coverage {
                                    let e = coverage_sums.entry(key.clone()).or_default();
                                    e.0 += c;
                                    e.1 += 1;
                                }
                            }
                            if let Err(e) = csv.write_record(CharacteristicsTable::csv_record(&row)) {
                                failure = Some(e.into());
                            }
                        }
                    }
                    Outcome::Failed { id, message } => {
                        log::error!("record `{id}` failed and was skipped: {message}");
                        if fail_fast {
                            failure = Some(CliError::Internal(format!("record `{id}` failed: {message}")));
                        }
                        summary.skipped.push(id);
                    }
                }
            }
            if last_log.elapsed().as_secs() >= 10 {
                last_log = Instant::now();
                log::info!("{} records processed", summary.records + summary.skipped.len());
            }
        }
        let produced = producer.join().map_err(|p| CliError::Internal(panic_message(p)))?;
        Ok(match (failure, produced) {
            (Some(f), _) => Err(f),
            (None, Err(e)) => Err(e),
            (None, Ok(_)) => Ok(()),
        })
    })?;
    read_result?;
    csv.flush()
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", output.display())))?;

    summary.seconds = started.elapsed().as_secs_f64();
    summary.coverage = coverage_sums
        .into_iter()
        .map(|(k, (sum, n))| (k, sum / n as f64))
        .collect();
    log_summary(&summary);
    Ok(summary)
}

fn log_summary(s: &ComputeSummary) {
    if s.records == 0 && s.skipped.is_empty() {
        log::warn!("the dataset has no records; wrote a header-only CSV");
    }
    let rate = if s.seconds > 0.0 { s.fragments as f64 / s.seconds } else { 0.0 };
    log::info!(
        "{} records, {} fragments in {:.2} s ({rate:.1} fragments/s); {} skipped",
        s.records,
        s.fragments,
        s.seconds,
        s.skipped.len()
    );
    for (key, n) in s.missing.iter().filter(|(_, n)| **n > 0) {
        log::info!("missing values: {key} {n}/{}", s.fragments);
    }
    for (key, c) in &s.coverage {
        log::info!("lexicon coverage: {key} {:.1}%", c * 100.0);
    }
    log::info!("wrote {}", s.output.display());
}
