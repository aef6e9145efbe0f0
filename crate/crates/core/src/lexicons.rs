//! Word-property databases and word sets, plus the manifest that locates them.
//!
//! All tables are immutable once loaded. Lookups never fail: a word that is
//! absent yields `None` and is counted against the caller's [`Coverage`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{Pipeline, PipelineResources, Token};

/// Environment variable that points at a data directory containing `lexicons.toml`.
pub const DATA_DIR_ENV: &str = "TCT_DATA_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    None,
    /// `log10(value + 1)`, for raw frequency counts.
    Log10,
}

/// Load-time settings for one word database.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatabaseConfig {
    pub name: String,
    #[serde(default)]
    pub transform: Transform,
    /// Allowed `[min, max]` for values in the file.
    #[serde(default)]
    pub range: Option<[f64; 2]>,
    #[serde(default = "default_true")]
    pub case_fold: bool,
    /// Exact-word values that take precedence over the table.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

fn default_true() -> bool {
    true
}

impl DatabaseConfig {
    pub fn named(name: impl Into<String>) -> Self {
        DatabaseConfig {
            name: name.into(),
            transform: Transform::None,
            range: None,
            case_fold: true,
            overrides: BTreeMap::new(),
        }
    }
}

/// Running found/total counts for database lookups.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Coverage {
    pub found: usize,
    pub total: usize,
}

impl Coverage {
    /// `found / total`, or `None` when nothing was looked up.
    pub fn ratio(&self) -> Option<f64> {
        (self.total > 0).then(|| self.found as f64 / self.total as f64)
    }
}

/// Immutable word → value table.
#[derive(Clone, Debug)]
pub struct WordDatabase {
    name: String,
    entries: HashMap<String, f64>,
    overrides: HashMap<String, f64>,
    case_fold: bool,
}

impl WordDatabase {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Table words in sorted order, overrides excluded.
    pub fn words(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    /// Value for a word, with overrides first.
    pub fn get(&self, word: &str) -> Option<f64> {
        let folded;
        let key = if self.case_fold {
            folded = word.to_lowercase();
            folded.as_str()
        } else {
            word
        };
        self.get_key(key)
    }

    fn get_key(&self, key: &str) -> Option<f64> {
        self.overrides
            .get(key)
            .or_else(|| self.entries.get(key))
            .copied()
    }

    /// Looks up a token by case-folded surface, then by lemma, and records the
    /// outcome in `coverage`.
    pub fn lookup(&self, token: &Token, coverage: &mut Coverage) -> Option<f64> {
        coverage.total += 1;
        let surface = if self.case_fold {
            token.lower.as_str()
        } else {
            token.surface.as_str()
        };
        let value = self
            .get_key(surface)
            .or_else(|| self.get_key(&token.lemma));
        if value.is_some() {
            coverage.found += 1;
        }
        value
    }

    /// Parses a `word<TAB>value` table with a header line.
    pub fn parse(text: &str, origin: &str, config: &DatabaseConfig) -> Result<Self> {
        let fold = |w: &str| {
            if config.case_fold {
                w.to_lowercase()
            } else {
                w.to_string()
            }
        };
        let mut entries = HashMap::new();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end().split('\t').next() == Some("word") => {}
            _ => {
                return Err(Error::Parse {
                    origin: origin.to_string(),
                    line: 1,
                    message: "expected header `word<TAB>value`".into(),
                })
            }
        }
        for (i, line) in lines {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (word, value) = line.split_once('\t').ok_or_else(|| Error::Parse {
                origin: origin.to_string(),
                line: line_no,
                message: "expected `word<TAB>value`".into(),
            })?;
            let raw: f64 = value
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    origin: origin.to_string(),
                    line: line_no,
                    message: format!("unparsable value `{}`", value.trim()),
                })?;
            let word = fold(word.trim());
            if let Some([min, max]) = config.range {
                if raw < min || raw > max {
                    return Err(Error::OutOfRange {
                        origin: origin.to_string(),
                        word,
                        value: raw,
                        min,
                        max,
                    });
                }
            }
            let value = match config.transform {
                Transform::None => raw,
                Transform::Log10 => (raw + 1.0).log10(),
            };
            if entries.insert(word.clone(), value).is_some() {
                return Err(Error::DuplicateWord {
                    origin: origin.to_string(),
                    word,
                });
            }
        }
        let overrides = config
            .overrides
            .iter()
            .map(|(w, v)| (fold(w), *v))
            .collect();
        Ok(WordDatabase {
            name: config.name.clone(),
            entries,
            overrides,
            case_fold: config.case_fold,
        })
    }
}

/// Reads and parses a word database from disk.
pub fn load_word_database(path: &Path, config: &DatabaseConfig) -> Result<WordDatabase> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    WordDatabase::parse(&text, &path.display().to_string(), config)
}

/// Immutable set of case-folded words and multi-word phrases.
#[derive(Clone, Debug)]
pub struct WordSet {
    name: String,
    members: HashSet<String>,
    /// Phrases as token sequences, longest first.
    phrases: Vec<Vec<String>>,
}

impl WordSet {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, entry: &str) -> bool {
        self.members.contains(entry)
    }

    /// Length in words of the longest member.
    pub fn max_len(&self) -> usize {
        self.phrases.first().map_or(1, Vec::len).max(1)
    }

    /// Parses one entry per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let members: HashSet<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
            .collect();
        if members.is_empty() {
            return Err(Error::EmptyWordSet(name.to_string()));
        }
        let mut phrases: Vec<Vec<String>> = members
            .iter()
            .filter(|m| m.contains(' '))
            .map(|m| m.split(' ').map(str::to_string).collect())
            .collect();
        phrases.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(WordSet {
            name: name.to_string(),
            members,
            phrases,
        })
    }

    /// Counts matches in a word sequence, scanning left to right and taking
    /// the longest member that starts at each position.
    pub fn count_matches<'a>(&self, words: impl IntoIterator<Item = &'a str>) -> usize {
        let words: Vec<&str> = words.into_iter().collect();
        let mut count = 0;
        let mut i = 0;
        while i < words.len() {
            let longest = self
                .phrases
                .iter()
                .find(|p| {
                    p.len() <= words.len() - i
                        && p.iter().zip(&words[i..]).all(|(a, b)| a == b)
                })
                .map(Vec::len);
            match longest {
                Some(n) => {
                    count += 1;
                    i += n;
                }
                None => {
                    if self.members.contains(words[i]) {
                        count += 1;
                    }
                    i += 1;
                }
            }
        }
        count
    }
}

pub fn load_word_set(path: &Path, name: &str) -> Result<WordSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    WordSet::parse(&text, name)
}

// ---------- manifest ----------

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelinePaths {
    pub abbreviations: Option<String>,
    pub closed_class: Option<String>,
    pub open_class: Option<String>,
    pub lemma_exceptions: Option<String>,
    pub syllable_exceptions: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordSetEntry {
    pub name: String,
    pub path: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatabaseEntry {
    pub path: String,
    #[serde(flatten)]
    pub config: DatabaseConfig,
}

/// Enumerates the lexicons to load. Paths are relative to the manifest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconManifest {
    #[serde(default)]
    pub pipeline: PipelinePaths,
    #[serde(default)]
    pub word_set: Vec<WordSetEntry>,
    #[serde(default)]
    pub database: Vec<DatabaseEntry>,
}

impl LexiconManifest {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("lexicon manifest: {e}")))
    }
}

macro_rules! bundled {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../data/", $path)))),*]
    };
}

static BUNDLED: &[(&str, &str)] = bundled![
    "lexicons.toml",
    "pipeline/abbreviations.txt",
    "pipeline/closed_class.tsv",
    "pipeline/open_class.tsv",
    "pipeline/lemma_exceptions.tsv",
    "pipeline/syllable_exceptions.tsv",
    "word_sets/first_person_singular.txt",
    "word_sets/first_person_plural.txt",
    "word_sets/second_person.txt",
    "word_sets/third_person_singular.txt",
    "word_sets/third_person_plural.txt",
    "word_sets/causal_connectives.txt",
    "word_sets/logical_connectives.txt",
    "word_sets/temporal_connectives.txt",
    "word_sets/additive_connectives.txt",
    "word_sets/positive_connectives.txt",
    "word_sets/negative_connectives.txt",
    "databases/word_frequency.tsv",
    "databases/mrc_familiarity.tsv",
    "databases/mrc_concreteness.tsv",
    "databases/mrc_imagability.tsv",
    "databases/mrc_meaningfulness.tsv",
    "databases/polysemy.tsv",
    "databases/hypernymy_noun.tsv",
    "databases/hypernymy_verb.tsv",
    "databases/aoa.tsv",
    "databases/concreteness.tsv",
    "databases/prevalence.tsv",
    "databases/genderedness_sample.tsv",
];

/// Where lexicon files are read from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DataSource {
    /// Files compiled into the library.
    Bundled,
    Dir(PathBuf),
}

impl DataSource {
    pub fn read(&self, rel: &str) -> Result<String> {
        match self {
            DataSource::Bundled => BUNDLED
                .iter()
                .find(|(p, _)| *p == rel)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| Error::Config(format!("no bundled data file `{rel}`"))),
            DataSource::Dir(dir) => {
                let path = dir.join(rel);
                std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
            }
        }
    }

    fn describe(&self, rel: &str) -> String {
        match self {
            DataSource::Bundled => format!("bundled:{rel}"),
            DataSource::Dir(dir) => dir.join(rel).display().to_string(),
        }
    }
}

/// Every loaded lexicon: pipeline word lists, word databases and word sets.
#[derive(Clone, Debug)]
pub struct Lexicons {
    pipeline: Arc<PipelineResources>,
    databases: BTreeMap<String, Arc<WordDatabase>>,
    word_sets: BTreeMap<String, Arc<WordSet>>,
}

impl Lexicons {
    /// The lexicons compiled into the library.
    pub fn bundled() -> Result<Self> {
        let manifest = LexiconManifest::parse(&DataSource::Bundled.read("lexicons.toml")?)?;
        Self::load(&manifest, &DataSource::Bundled)
    }

    /// Loads from a manifest file; relative paths resolve against its directory.
    pub fn from_manifest(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest = LexiconManifest::parse(&text)?;
        let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::load(&manifest, &DataSource::Dir(dir))
    }

    /// `$TCT_DATA_DIR/lexicons.toml` when the variable is set, the bundled data otherwise.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                Self::from_manifest(&PathBuf::from(dir).join("lexicons.toml"))
            }
            _ => Self::bundled(),
        }
    }

    /// Loads everything a manifest lists. Pipeline lists the manifest leaves
    /// out come from the bundled data.
    pub fn load(manifest: &LexiconManifest, source: &DataSource) -> Result<Self> {
        let pick = |custom: &Option<String>, default: &str| -> Result<String> {
            match custom {
                Some(rel) => source.read(rel),
                None => DataSource::Bundled.read(default),
            }
        };
        let p = &manifest.pipeline;
        let pipeline = PipelineResources::from_texts(
            &pick(&p.abbreviations, "pipeline/abbreviations.txt")?,
            &pick(&p.closed_class, "pipeline/closed_class.tsv")?,
            &pick(&p.open_class, "pipeline/open_class.tsv")?,
            &pick(&p.lemma_exceptions, "pipeline/lemma_exceptions.tsv")?,
            &pick(&p.syllable_exceptions, "pipeline/syllable_exceptions.tsv")?,
        )?;

        let mut word_sets = BTreeMap::new();
        for entry in &manifest.word_set {
            let set = WordSet::parse(&source.read(&entry.path)?, &entry.name)?;
            if word_sets.insert(entry.name.clone(), Arc::new(set)).is_some() {
                return Err(Error::Config(format!("word set `{}` listed twice", entry.name)));
            }
        }
        let mut databases = BTreeMap::new();
        for entry in &manifest.database {
            let db = WordDatabase::parse(
                &source.read(&entry.path)?,
                &source.describe(&entry.path),
                &entry.config,
            )?;
            if databases.insert(entry.config.name.clone(), Arc::new(db)).is_some() {
                return Err(Error::Config(format!(
                    "database `{}` listed twice",
                    entry.config.name
                )));
            }
        }
        Ok(Lexicons {
            pipeline: Arc::new(pipeline),
            databases,
            word_sets,
        })
    }

    /// One-line inventory for logs.
    pub fn summary(&self) -> String {
        let dbs: Vec<&str> = self.databases.keys().map(String::as_str).collect();
        format!(
            "{} databases ({}), {} word sets",
            dbs.len(),
            dbs.join(", "),
            self.word_sets.len()
        )
    }

    /// An empty collection over the given pipeline resources.
    pub fn with_pipeline(resources: PipelineResources) -> Self {
        Lexicons {
            pipeline: Arc::new(resources),
            databases: BTreeMap::new(),
            word_sets: BTreeMap::new(),
        }
    }

    pub fn pipeline(&self) -> Pipeline {
        Pipeline::new(self.pipeline.clone())
    }

    pub fn pipeline_resources(&self) -> &PipelineResources {
        &self.pipeline
    }

    pub fn database(&self, name: &str) -> Option<&Arc<WordDatabase>> {
        self.databases.get(name)
    }

    pub fn word_set(&self, name: &str) -> Option<&Arc<WordSet>> {
        self.word_sets.get(name)
    }

    pub fn database_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.databases.keys().map(String::as_str)
    }

    pub fn word_set_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.word_sets.keys().map(String::as_str)
    }

    pub fn insert_database(&mut self, db: WordDatabase) {
        self.databases.insert(db.name.clone(), Arc::new(db));
    }

    pub fn insert_word_set(&mut self, set: WordSet) {
        self.word_sets.insert(set.name.clone(), Arc::new(set));
    }
}
