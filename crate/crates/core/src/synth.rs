//! Seeded generators of synthetic English-like text for demos, benchmarks
//! and tests. Words come from the bundled lexicon so the tagger and word
//! databases recognise them.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{FragmentSet, OutcomeColumn, OutcomeKind, Record};
use crate::error::{Error, Result};
use crate::lexicons::Lexicons;
use crate::metrics::{MetricRegistry, Selection};

const CONCRETE_NOUNS: &[&str] = &[
    "book", "house", "water", "room", "table", "door", "window", "car", "tree", "dog", "cat", "bird",
    "chair", "bed", "road", "river", "stone", "bottle", "hand", "head", "eye", "friend", "mother",
    "father", "child", "student", "school", "city", "garden", "kitchen", "paper", "box", "horse",
    "apple", "bread", "church", "shop", "train", "hat", "shoe",
];

const ABSTRACT_NOUNS: &[&str] = &[
    "idea", "theory", "belief", "freedom", "justice", "truth", "beauty", "courage", "wisdom",
    "knowledge", "anger", "joy", "sorrow", "grief", "happiness", "peace", "faith", "trust", "pride",
    "shame", "guilt", "luck", "fate", "purpose", "meaning", "quality", "ability", "opportunity",
    "necessity", "importance", "complexity", "strategy", "method", "principle", "notion", "aspect",
    "factor", "condition", "concept", "possibility",
];

const VERBS_PAST: &[&str] = &[
    "walked", "opened", "reached", "helped", "started", "played", "moved", "followed", "allowed",
    "watched", "used", "turned", "liked", "believed", "provided", "learned", "created", "added",
    "remembered", "considered", "expected", "served", "needed", "wanted", "called", "asked",
    "changed", "carried", "finished", "visited",
];

const ADJECTIVES: &[&str] = &[
    "good", "new", "long", "great", "little", "old", "big", "high", "different", "small", "large",
    "early", "young", "important", "public", "bad", "hard", "strong", "whole", "free", "true",
    "full", "special", "easy", "clear", "recent", "red", "difficult", "short", "wrong", "common",
    "poor", "natural", "quiet", "warm",
];

const ADVERBS: &[&str] = &[
    "really", "usually", "certainly", "probably", "clearly", "simply", "actually", "finally",
    "suddenly", "quickly", "slowly", "carefully", "easily", "nearly", "especially", "mostly",
];

const PREPOSITIONS: &[&str] = &["in", "on", "near", "under", "behind", "with", "from", "into"];
const CONNECTIVES: &[&str] = &["because", "although", "when", "while", "after", "before", "since"];
const PRONOUNS: &[&str] = &["she", "he", "they", "we", "i", "you"];

/// Generates paragraphs from a fixed set of sentence templates.
pub struct TextGenerator {
    rng: ChaCha8Rng,
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

impl TextGenerator {
    pub fn new(seed: u64) -> Self {
        TextGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn pick(&mut self, words: &[&'static str]) -> &'static str {
        words.choose(&mut self.rng).expect("non-empty word list")
    }

    /// A noun that is concrete with probability `concreteness`.
    fn noun(&mut self, concreteness: f64) -> &'static str {
        if self.rng.gen_bool(concreteness.clamp(0.0, 1.0)) {
            self.pick(CONCRETE_NOUNS)
        } else {
            self.pick(ABSTRACT_NOUNS)
        }
    }

    /// One sentence; returns the text and its word count.
    pub fn sentence(&mut self, concreteness: f64) -> (String, usize) {
        let c = concreteness;
        let template = self.rng.gen_range(0..6);
        let words: Vec<String> = match template {
            0 => vec![
                "the".into(),
                self.pick(ADJECTIVES).into(),
                self.noun(c).into(),
                self.pick(VERBS_PAST).into(),
                "the".into(),
                self.noun(c).into(),
            ],
            1 => vec![
                self.pick(PRONOUNS).into(),
                self.pick(ADVERBS).into(),
                self.pick(VERBS_PAST).into(),
                "a".into(),
                self.pick(ADJECTIVES).into(),
                self.noun(c).into(),
                self.pick(PREPOSITIONS).into(),
                "the".into(),
                self.noun(c).into(),
            ],
            2 => vec![
                self.pick(CONNECTIVES).into(),
                "the".into(),
                self.noun(c).into(),
                format!("{},", self.pick(VERBS_PAST)),
                "the".into(),
                self.pick(ADJECTIVES).into(),
                self.noun(c).into(),
                self.pick(VERBS_PAST).into(),
                "the".into(),
                self.noun(c).into(),
            ],
            3 => vec![
                "the".into(),
                self.noun(c).into(),
                "and".into(),
                "the".into(),
                self.noun(c).into(),
                self.pick(VERBS_PAST).into(),
                self.pick(PREPOSITIONS).into(),
                "the".into(),
                self.pick(ADJECTIVES).into(),
                self.noun(c).into(),
                self.pick(CONNECTIVES).into(),
                "they".into(),
                self.pick(VERBS_PAST).into(),
                self.pick(ADVERBS).into(),
            ],
            4 => vec![
                "in".into(),
                self.rng.gen_range(1950..2024).to_string(),
                "the".into(),
                self.noun(c).into(),
                self.pick(VERBS_PAST).into(),
                self.rng.gen_range(2..40).to_string(),
                self.noun(c).into(),
            ],
            _ => vec![
                "this".into(),
                self.noun(c).into(),
                "was".into(),
                "not".into(),
                self.pick(ADJECTIVES).into(),
                "but".into(),
                "the".into(),
                self.noun(c).into(),
                "was".into(),
                self.pick(ADJECTIVES).into(),
            ],
        };
        let count = words.len();
        let mut text = words.join(" ");
        text = capitalize(&text);
        text.push(if self.rng.gen_bool(0.1) { '!' } else { '.' });
        (text, count)
    }

    /// Sentences appended until at least `target_words` words.
    pub fn paragraph(&mut self, target_words: usize, concreteness: f64) -> String {
        let mut sentences = Vec::new();
        let mut words = 0;
        while words < target_words.max(1) {
            let (s, n) = self.sentence(concreteness);
            sentences.push(s);
            words += n;
        }
        sentences.join(" ")
    }
}

/// Zero-padded record id, e.g. `r000042`.
pub fn record_id(i: usize) -> String {
    format!("r{i:06}")
}

fn text_record(i: usize, text: String) -> Record {
    Record {
        id: record_id(i),
        fragments: BTreeMap::from([("text".to_string(), text)]),
        missing: Vec::new(),
    }
}

/// `n` single-fragment records of about `words` words each.
pub fn paragraph_corpus(seed: u64, n: usize, words: usize) -> FragmentSet {
    let mut g = TextGenerator::new(seed);
    let records = (0..n)
        .map(|i| {
            let target = (words as f64 * g.rng().gen_range(0.8..1.2)).round() as usize;
            let c = g.rng().gen_range(0.2..0.8);
            text_record(i, g.paragraph(target, c))
        })
        .collect();
    FragmentSet {
        fragment_names: vec!["text".to_string()],
        records,
    }
}

/// Records whose length (20–150 words) and share of concrete nouns are
/// drawn independently.
pub fn length_concreteness_corpus(seed: u64, n: usize) -> FragmentSet {
    let mut g = TextGenerator::new(seed);
    let records = (0..n)
        .map(|i| {
            let target = g.rng().gen_range(20..=150);
            let c = g.rng().gen_range(0.0..=1.0);
            text_record(i, g.paragraph(target, c))
        })
        .collect();
    FragmentSet {
        fragment_names: vec!["text".to_string()],
        records,
    }
}

/// Population z-scores.
pub fn zscores(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    values.iter().map(|v| if sd > 0.0 { (v - mean) / sd } else { 0.0 }).collect()
}

/// Independent Bernoulli draws with the given probabilities.
pub fn bernoulli(probabilities: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    probabilities
        .iter()
        .map(|&p| f64::from(u8::from(rng.gen::<f64>() < p)))
        .collect()
}

/// A labelled corpus with an outcome planted on computed characteristics.
pub struct PlantedDemo {
    pub fragments: FragmentSet,
    pub outcome: OutcomeColumn,
    /// Metric keys and the logistic weights planted on their z-scores.
    pub planted: Vec<(String, f64)>,
}

/// Length/concreteness corpus with a binary outcome drawn from
/// `sigmoid(Σ wₖ·z(metricₖ))`, where the metrics are computed on the text.
pub fn planted_logistic_demo(
    seed: u64,
    n: usize,
    lexicons: &Lexicons,
    planted: &[(&str, f64)],
    outcome_name: &str,
) -> Result<PlantedDemo> {
    let fragments = length_concreteness_corpus(seed, n);
    let keys: Vec<String> = planted.iter().map(|(k, _)| k.to_string()).collect();
    let set = MetricRegistry::with_defaults().initialize(lexicons, &Selection::Keys(keys.clone()))?;
    let table = set.compute_table(&fragments, 1)?;
    let mut logits = vec![0.0; n];
    for (key, weight) in planted {
        let col = table.column_index(key).ok_or_else(|| Error::UnknownMetric(key.to_string()))?;
        let values: Vec<f64> = table
            .rows
            .iter()
            .map(|r| r.cells[col].value)
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidInput(format!("`{key}` is missing for some generated text")))?;
        for (l, z) in logits.iter_mut().zip(zscores(&values)) {
            *l += weight * z;
        }
    }
    let probs: Vec<f64> = logits.iter().map(|&z| crate::analysis::sigmoid(z)).collect();
    let y = bernoulli(&probs, seed ^ 0x5EED);
    let outcome = OutcomeColumn::new(
        outcome_name,
        OutcomeKind::Binary,
        fragments.records.iter().map(|r| r.id.clone()).zip(y),
    )?;
    Ok(PlantedDemo {
        fragments,
        outcome,
        planted: planted.iter().map(|(k, w)| (k.to_string(), *w)).collect(),
    })
}

/// One synthetic coreference example.
#[derive(Clone, Debug, PartialEq)]
pub struct CorefExample {
    pub id: String,
    pub sentence: String,
    pub occupation: String,
    pub pronoun: String,
}

/// Sentences pairing an occupation with a gendered pronoun that refers to it.
pub fn coref_examples(seed: u64, n: usize, occupations: &[String]) -> Vec<CorefExample> {
    let mut g = TextGenerator::new(seed);
    let pronouns = ["he", "she"];
    (0..n)
        .map(|i| {
            let occ = occupations.choose(g.rng()).expect("non-empty occupation list").clone();
            let pron = *pronouns.choose(g.rng()).expect("two pronouns");
            let verb = g.pick(VERBS_PAST);
            let other = g.pick(CONCRETE_NOUNS);
            let adj = g.pick(ADJECTIVES);
            let conn = g.pick(&["because", "since", "although"]);
            CorefExample {
                id: record_id(i),
                sentence: format!("The {occ} {verb} the {other} {conn} {pron} was {adj}."),
                occupation: format!("the {occ}"),
                pronoun: pron.to_string(),
            }
        })
        .collect()
}

/// Coreference examples as records with `sentence`, `occupation` and
/// `pronoun` fragments.
pub fn coref_fragments(examples: &[CorefExample]) -> FragmentSet {
    let records = examples
        .iter()
        .map(|e| Record {
            id: e.id.clone(),
            fragments: BTreeMap::from([
                ("occupation".to_string(), e.occupation.clone()),
                ("pronoun".to_string(), e.pronoun.clone()),
                ("sentence".to_string(), e.sentence.clone()),
            ]),
            missing: Vec::new(),
        })
        .collect();
    FragmentSet {
        fragment_names: vec!["occupation".into(), "pronoun".into(), "sentence".into()],
        records,
    }
}
