//! Flesch Reading Ease and Flesch-Kincaid Grade Level.

use crate::pipeline::DocumentAnalysis;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Readability {
    pub reading_ease: f64,
    pub grade_level: f64,
}

/// Both scores from word, sentence and syllable totals; `None` when there are
/// no words or no sentences.
pub fn readability_from_counts(words: usize, sentences: usize, syllables: usize) -> Option<Readability> {
    if words == 0 || sentences == 0 {
        return None;
    }
    let words_per_sentence = words as f64 / sentences as f64;
    let syllables_per_word = syllables as f64 / words as f64;
    Some(Readability {
        reading_ease: 206.835 - 1.015 * words_per_sentence - 84.6 * syllables_per_word,
        grade_level: 0.39 * words_per_sentence + 11.8 * syllables_per_word - 15.59,
    })
}

pub fn readability(doc: &DocumentAnalysis) -> Option<Readability> {
    let syllables = doc.words().map(|w| w.syllables as usize).sum();
    readability_from_counts(doc.word_count(), doc.sentence_count(), syllables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_sat() {
        let r = readability_from_counts(3, 1, 3).unwrap();
        assert!((r.reading_ease - 119.19).abs() < 1e-9);
        assert!((r.grade_level - -2.62).abs() < 1e-9);
        assert_eq!(readability_from_counts(0, 1, 0), None);
        assert_eq!(readability_from_counts(3, 0, 3), None);
    }

    #[test]
    fn ratio_invariance() {
        assert_eq!(readability_from_counts(10, 2, 14), readability_from_counts(20, 4, 28));
    }
}
