//! Counts, lengths and their spreads.

use std::collections::BTreeMap;

use crate::pipeline::DocumentAnalysis;
use crate::stats::{mean, sample_std};

pub const DESCRIPTIVE_KEYS: [&str; 12] = [
    "DESPC", "DESSC", "DESWC", "DESPL", "DESPLd", "DESPLw", "DESSL", "DESSLd", "DESWLsy",
    "DESWLsyd", "DESWLlt", "DESWLltd",
];

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// All twelve descriptive values. Counts are always present; means need a
/// nonempty population and standard deviations (sample, n − 1) need two items.
pub fn descriptive_metrics(doc: &DocumentAnalysis) -> BTreeMap<&'static str, Option<f64>> {
    let paragraphs = doc.paragraphs.len();
    let sentences = doc.sentence_count();
    let words = doc.word_count();

    let sentences_per_paragraph: Vec<f64> =
        doc.paragraphs.iter().map(|p| p.sentences.len() as f64).collect();
    let words_per_sentence: Vec<f64> = doc.sentences().map(|s| s.word_count() as f64).collect();
    let syllables: Vec<f64> = doc.words().map(|w| w.syllables as f64).collect();
    let letters: Vec<f64> = doc.words().map(|w| w.letters as f64).collect();

    BTreeMap::from([
        ("DESPC", Some(paragraphs as f64)),
        ("DESSC", Some(sentences as f64)),
        ("DESWC", Some(words as f64)),
        ("DESPL", ratio(sentences, paragraphs)),
        ("DESPLd", sample_std(&sentences_per_paragraph)),
        ("DESPLw", ratio(words, paragraphs)),
        ("DESSL", ratio(words, sentences)),
        ("DESSLd", sample_std(&words_per_sentence)),
        ("DESWLsy", mean(&syllables)),
        ("DESWLsyd", sample_std(&syllables)),
        ("DESWLlt", mean(&letters)),
        ("DESWLltd", sample_std(&letters)),
    ])
}
