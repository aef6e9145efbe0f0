//! Metric registry and the built-in characteristics.
//!
//! A metric is registered as a pair of functions: an initializer that pulls
//! whatever it needs out of the loaded [`Lexicons`], and the compute function
//! it returns, which maps a [`DocumentAnalysis`] to a [`Cell`]. Built-in and
//! user-defined metrics go through the same path.

pub mod descriptive;
pub mod diversity;
pub mod incidence;
pub mod readability;
pub mod syntax;
mod table;
pub mod word_property;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::FragmentSet;
use crate::error::{Error, Result};
use crate::lexicons::Lexicons;
use crate::pipeline::{DocumentAnalysis, Pipeline, Pos, Sentence};

pub use table::{CharacteristicsTable, TableRow};
pub use word_property::{Aggregate, WordSelection};

use diversity::{DEFAULT_HDD_SAMPLE, DEFAULT_MTLD_THRESHOLD};
use incidence::TokenAttribute;
use syntax::SimilarityMode;

/// One computed value. `value` is `None` when the metric is undefined for the
/// document; `coverage` is set by word-property metrics only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub value: Option<f64>,
    pub coverage: Option<f64>,
}

impl From<Option<f64>> for Cell {
    fn from(value: Option<f64>) -> Self {
        Cell {
            value,
            coverage: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Descriptive,
    LexicalDiversity,
    Syntactic,
    Readability,
    Incidence,
    WordProperty,
}

/// A lexicon a metric needs before it can be initialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Requirement {
    Database(String),
    WordSet(String),
}

/// The compute half of a metric.
pub trait ComputeMetric: Send + Sync {
    fn compute(&self, doc: &DocumentAnalysis) -> Cell;
}

impl<F> ComputeMetric for F
where
    F: Fn(&DocumentAnalysis) -> Cell + Send + Sync,
{
    fn compute(&self, doc: &DocumentAnalysis) -> Cell {
        self(doc)
    }
}

type InitFn = dyn Fn(&Lexicons) -> Result<Box<dyn ComputeMetric>> + Send + Sync;

/// Registration record for one metric.
#[derive(Clone)]
pub struct MetricSpec {
    pub key: String,
    pub category: Category,
    pub requirements: Vec<Requirement>,
    init: Arc<InitFn>,
}

impl fmt::Debug for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpec")
            .field("key", &self.key)
            .field("category", &self.category)
            .field("requirements", &self.requirements)
            .finish_non_exhaustive()
    }
}

impl MetricSpec {
    pub fn new<I>(key: impl Into<String>, category: Category, requirements: Vec<Requirement>, init: I) -> Self
    where
        I: Fn(&Lexicons) -> Result<Box<dyn ComputeMetric>> + Send + Sync + 'static,
    {
        MetricSpec {
            key: key.into(),
            category,
            requirements,
            init: Arc::new(init),
        }
    }

    /// A metric that needs no resources.
    pub fn from_fn<F>(key: impl Into<String>, category: Category, f: F) -> Self
    where
        F: Fn(&DocumentAnalysis) -> Option<f64> + Clone + Send + Sync + 'static,
    {
        MetricSpec::new(key, category, Vec::new(), move |_| {
            let f = f.clone();
            Ok(Box::new(move |doc: &DocumentAnalysis| Cell::from(f(doc))) as Box<dyn ComputeMetric>)
        })
    }

    /// A word-property metric described by configuration.
    pub fn word_property(def: WordPropertyDef) -> Self {
        let sources: Vec<(WordSelection, String)> = def.sources();
        let requirements = sources
            .iter()
            .map(|(_, db)| Requirement::Database(db.clone()))
            .collect();
        let aggregate = def.aggregate;
        MetricSpec::new(def.key, Category::WordProperty, requirements, move |lex| {
            let resolved = sources
                .iter()
                .map(|(sel, name)| {
                    lex.database(name)
                        .cloned()
                        .map(|db| (sel.clone(), db))
                        .ok_or_else(|| Error::Config(format!("database `{name}` is not loaded")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Box::new(move |doc: &DocumentAnalysis| {
                let refs: Vec<_> = resolved.iter().map(|(s, db)| (s, &**db)).collect();
                let stat = word_property::word_property_multi(doc, &refs, aggregate);
                Cell {
                    value: stat.value,
                    coverage: Some(stat.coverage.ratio().unwrap_or(0.0)),
                }
            }) as Box<dyn ComputeMetric>)
        })
    }

    /// Runs the initializer.
    pub fn initialize(&self, lexicons: &Lexicons) -> Result<Box<dyn ComputeMetric>> {
        (self.init)(lexicons)
    }
}

/// Configuration for a word-property metric: aggregate a database's values
/// over selected words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordPropertyDef {
    pub key: String,
    pub database: String,
    #[serde(default = "default_aggregate")]
    pub aggregate: Aggregate,
    #[serde(default = "default_selection")]
    pub words: WordSelection,
    /// Further (selection, database) pairs consulted, in order, for words the
    /// primary selection rejects.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub also: Vec<(WordSelection, String)>,
}

fn default_aggregate() -> Aggregate {
    Aggregate::Mean
}

fn default_selection() -> WordSelection {
    WordSelection::All
}

impl WordPropertyDef {
    pub fn new(key: &str, database: &str, aggregate: Aggregate, words: WordSelection) -> Self {
        WordPropertyDef {
            key: key.to_string(),
            database: database.to_string(),
            aggregate,
            words,
            also: Vec::new(),
        }
    }

    fn sources(&self) -> Vec<(WordSelection, String)> {
        std::iter::once((self.words.clone(), self.database.clone()))
            .chain(self.also.iter().cloned())
            .collect()
    }
}

/// Tunable parameters of the built-in metrics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub mtld_threshold: f64,
    pub hdd_sample_size: usize,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            mtld_threshold: DEFAULT_MTLD_THRESHOLD,
            hdd_sample_size: DEFAULT_HDD_SAMPLE,
        }
    }
}

/// Metrics to compute.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Selection {
    #[default]
    All,
    Keys(Vec<String>),
}

/// Registered metrics, keyed by metric key.
#[derive(Clone, Debug, Default)]
pub struct MetricRegistry {
    specs: BTreeMap<String, MetricSpec>,
}

impl MetricRegistry {
    pub fn empty() -> Self {
        MetricRegistry::default()
    }

    /// The built-in characteristics with default parameters.
    pub fn with_defaults() -> Self {
        MetricRegistry::with_params(MetricParams::default())
    }

    pub fn with_params(params: MetricParams) -> Self {
        let mut registry = MetricRegistry::empty();
        for spec in builtin_specs(params) {
            registry
                .register(spec)
                .expect("built-in metric keys are unique");
        }
        registry
    }

    /// Adds a metric; its key must be new.
    pub fn register(&mut self, spec: MetricSpec) -> Result<()> {
        if self.specs.contains_key(&spec.key) {
            return Err(Error::DuplicateMetric(spec.key));
        }
        self.specs.insert(spec.key.clone(), spec);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// Registered keys in lexicographic order.
    pub fn keys(&self) -> impl Iterator<Item = &str> + '_ {
        self.specs.keys().map(String::as_str)
    }

    pub fn get(&self, key: &str) -> Option<&MetricSpec> {
        self.specs.get(key)
    }

    /// Resolves the selection, checks every requirement against `lexicons`,
    /// then initializes the selected metrics.
    pub fn initialize(&self, lexicons: &Lexicons, selection: &Selection) -> Result<MetricSet> {
        let specs: Vec<&MetricSpec> = match selection {
            Selection::All => self.specs.values().collect(),
            Selection::Keys(keys) => {
                let mut keys: Vec<&String> = keys.iter().collect();
                keys.sort();
                keys.dedup();
                keys.into_iter()
                    .map(|k| self.specs.get(k).ok_or_else(|| Error::UnknownMetric(k.clone())))
                    .collect::<Result<_>>()?
            }
        };
        for spec in &specs {
            for req in &spec.requirements {
                let (kind, name, present) = match req {
                    Requirement::Database(n) => ("database", n, lexicons.database(n).is_some()),
                    Requirement::WordSet(n) => ("word set", n, lexicons.word_set(n).is_some()),
                };
                if !present {
                    return Err(Error::MissingLexicon {
                        metric: spec.key.clone(),
                        kind,
                        name: name.clone(),
                    });
                }
            }
        }
        let metrics = specs
            .iter()
            .map(|s| s.initialize(lexicons))
            .collect::<Result<Vec<_>>>()?;
        Ok(MetricSet {
            keys: specs.iter().map(|s| s.key.clone()).collect(),
            metrics,
            pipeline: lexicons.pipeline(),
        })
    }
}

/// Initialized metrics ready to run, in column order.
pub struct MetricSet {
    keys: Vec<String>,
    metrics: Vec<Box<dyn ComputeMetric>>,
    pipeline: Pipeline,
}

impl fmt::Debug for MetricSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSet").field("keys", &self.keys).finish_non_exhaustive()
    }
}

impl MetricSet {
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn compute_document(&self, doc: &DocumentAnalysis) -> Vec<Cell> {
        self.metrics.iter().map(|m| m.compute(doc)).collect()
    }

    /// Runs the pipeline once and every metric on its output.
    pub fn compute_text(&self, text: &str) -> Vec<Cell> {
        self.compute_document(&self.pipeline.analyze(text))
    }

    /// One row per (record, fragment), records in input order and fragment
    /// names in lexicographic order. Fragments are spread over `workers`
    /// threads; the output does not depend on the worker count.
    pub fn compute_table(&self, fragments: &FragmentSet, workers: usize) -> Result<CharacteristicsTable> {
        let jobs: Vec<(&str, &str, &str)> = fragments
            .records
            .iter()
            .flat_map(|r| {
                r.fragments
                    .iter()
                    .map(move |(name, text)| (r.id.as_str(), name.as_str(), text.as_str()))
            })
            .collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        let rows = pool.install(|| {
            jobs.par_iter()
                .map(|&(id, name, text)| TableRow {
                    record_id: id.to_string(),
                    fragment: name.to_string(),
                    cells: self.compute_text(text),
                })
                .collect()
        });
        Ok(CharacteristicsTable {
            columns: self.keys.clone(),
            rows,
        })
    }
}

/// Initializes the selected metrics and computes the table.
pub fn compute_table(
    fragments: &FragmentSet,
    registry: &MetricRegistry,
    lexicons: &Lexicons,
    selection: &Selection,
    workers: usize,
) -> Result<CharacteristicsTable> {
    registry
        .initialize(lexicons, selection)?
        .compute_table(fragments, workers)
}

// ---------- built-ins ----------

fn sentences(doc: &DocumentAnalysis) -> Vec<&Sentence> {
    doc.sentences().collect()
}

/// The word-set names behind the `WORD_SET_INCIDENCE_*` metrics.
pub const WORD_SET_NAMES: [&str; 11] = [
    "WRDPRP1s", "WRDPRP1p", "WRDPRP2", "WRDPRP3s", "WRDPRP3p", "CNCCaus", "CNCLogic", "CNCTemp",
    "CNCAdd", "CNCPos", "CNCNeg",
];

/// Built-in word-property metrics and the databases they read.
pub fn builtin_word_properties() -> Vec<WordPropertyDef> {
    use Aggregate::{Max, Mean, Min};
    use WordSelection::{All, Content};
    let nouns = || WordSelection::Pos(vec![Pos::Noun]);
    let verbs = || WordSelection::Pos(vec![Pos::Verb]);
    let def = |key: &str, db: &str, agg, sel| WordPropertyDef::new(&format!("WORD_PROPERTY_{key}"), db, agg, sel);
    let mut hyp_nv = def("WRDHYPnv", "hypernymy_noun", Mean, nouns());
    hyp_nv.also.push((verbs(), "hypernymy_verb".to_string()));
    vec![
        def("WRDFRQc", "word_frequency", Mean, Content),
        def("WRDFRQa", "word_frequency", Mean, All),
        def("WRDFRQmc", "word_frequency", Min, Content),
        def("WRDFAMc", "mrc_familiarity", Mean, Content),
        def("WRDCNCc", "mrc_concreteness", Mean, Content),
        def("WRDIMGc", "mrc_imagability", Mean, Content),
        def("WRDMEAc", "mrc_meaningfulness", Mean, Content),
        def("WRDPOLc", "polysemy", Mean, Content),
        def("WRDHYPn", "hypernymy_noun", Mean, nouns()),
        def("WRDHYPv", "hypernymy_verb", Mean, verbs()),
        hyp_nv,
        def("AOA", "aoa", Mean, All),
        def("AOA_MAX", "aoa", Max, All),
        def("CONCRETENESS", "concreteness", Mean, All),
        def("PREVALENCE", "prevalence", Mean, All),
        def("PREVALENCE_MIN", "prevalence", Min, All),
    ]
}

fn builtin_specs(params: MetricParams) -> Vec<MetricSpec> {
    use Category::*;
    let mut specs = Vec::new();

    for key in descriptive::DESCRIPTIVE_KEYS {
        specs.push(MetricSpec::from_fn(key, Descriptive, move |doc| {
            descriptive::descriptive_metrics(doc)[key]
        }));
    }

    specs.push(MetricSpec::from_fn("LDTTRc", LexicalDiversity, |doc| {
        diversity::ttr(&doc.words().collect::<Vec<_>>(), true)
    }));
    specs.push(MetricSpec::from_fn("LDTTRa", LexicalDiversity, |doc| {
        diversity::ttr(&doc.words().collect::<Vec<_>>(), false)
    }));
    specs.push(MetricSpec::from_fn("LDMTLD", LexicalDiversity, move |doc| {
        diversity::mtld(&doc.words().collect::<Vec<_>>(), params.mtld_threshold)
    }));
    specs.push(MetricSpec::from_fn("LDHDD", LexicalDiversity, move |doc| {
        diversity::hdd(&doc.words().collect::<Vec<_>>(), params.hdd_sample_size)
    }));

    specs.push(MetricSpec::from_fn("SYNLE", Syntactic, |doc| {
        syntax::left_embeddedness(&sentences(doc))
    }));
    specs.push(MetricSpec::from_fn("SYNNP", Syntactic, |doc| syntax::np_modifiers(&sentences(doc))));
    specs.push(MetricSpec::from_fn("SYNMEDpos", Syntactic, |doc| {
        syntax::sentence_edit_distances(&sentences(doc)).map(|d| d.pos)
    }));
    specs.push(MetricSpec::from_fn("SYNMEDwrd", Syntactic, |doc| {
        syntax::sentence_edit_distances(&sentences(doc)).map(|d| d.words)
    }));
    specs.push(MetricSpec::from_fn("SYNMEDlem", Syntactic, |doc| {
        syntax::sentence_edit_distances(&sentences(doc)).map(|d| d.lemmas)
    }));
    specs.push(MetricSpec::from_fn("SYNSTRUTa", Syntactic, |doc| {
        syntax::syntax_similarity(&sentences(doc), SimilarityMode::Adjacent)
    }));
    specs.push(MetricSpec::from_fn("SYNSTRUTt", Syntactic, |doc| {
        syntax::syntax_similarity(&sentences(doc), SimilarityMode::AllPairs)
    }));

    specs.push(MetricSpec::from_fn("RDFRE", Readability, |doc| {
        readability::readability(doc).map(|r| r.reading_ease)
    }));
    specs.push(MetricSpec::from_fn("READFKGL", Readability, |doc| {
        readability::readability(doc).map(|r| r.grade_level)
    }));

    for (attribute, key) in TokenAttribute::ALL {
        specs.push(MetricSpec::from_fn(key, Incidence, move |doc| {
            incidence::token_attribute_ratio(doc, attribute)
        }));
    }
    for set_name in WORD_SET_NAMES {
        specs.push(MetricSpec::new(
            format!("WORD_SET_INCIDENCE_{set_name}"),
            Incidence,
            vec![Requirement::WordSet(set_name.to_string())],
            move |lex| {
                let set = lex
                    .word_set(set_name)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("word set `{set_name}` is not loaded")))?;
                Ok(Box::new(move |doc: &DocumentAnalysis| {
                    Cell::from(incidence::word_set_incidence(doc, &set))
                }) as Box<dyn ComputeMetric>)
            },
        ));
    }
    let pos_incidences: [(&str, &'static [Pos]); 4] = [
        ("WORD_PROPERTY_WRDNOUN", &[Pos::Propn, Pos::Noun]),
        ("WORD_PROPERTY_WRDVERB", &[Pos::Verb]),
        ("WORD_PROPERTY_WRDADJ", &[Pos::Adj]),
        ("WORD_PROPERTY_WRDADV", &[Pos::Adv]),
    ];
    for (key, tags) in pos_incidences {
        specs.push(MetricSpec::from_fn(key, Incidence, move |doc| incidence::pos_incidence(doc, tags)));
    }

    specs.extend(builtin_word_properties().into_iter().map(MetricSpec::word_property));
    specs
}
