//! Token-attribute ratios and per-1000-word incidence scores.

use crate::lexicons::WordSet;
use crate::pipeline::{DocumentAnalysis, Pos, Token};

/// Token-level attribute tests behind the `TOKEN_ATTRIBUTE_RATIO_*` metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenAttribute {
    Alpha,
    Digit,
    Punct,
    Url,
    Email,
}

impl TokenAttribute {
    pub const ALL: [(TokenAttribute, &'static str); 5] = [
        (TokenAttribute::Alpha, "TOKEN_ATTRIBUTE_RATIO_ALHPA"),
        (TokenAttribute::Digit, "TOKEN_ATTRIBUTE_RATIO_DIGIT"),
        (TokenAttribute::Punct, "TOKEN_ATTRIBUTE_RATIO_PUNCT"),
        (TokenAttribute::Url, "TOKEN_ATTRIBUTE_RATIO_URL"),
        (TokenAttribute::Email, "TOKEN_ATTRIBUTE_RATIO_EMAIL"),
    ];

    pub fn test(self, token: &Token) -> bool {
        let f = token.flags;
        match self {
            TokenAttribute::Alpha => f.is_alpha,
            TokenAttribute::Digit => f.is_digit,
            TokenAttribute::Punct => f.is_punct,
            TokenAttribute::Url => f.is_url,
            TokenAttribute::Email => f.is_email,
        }
    }
}

/// Matching tokens over all tokens; `None` for a document without tokens.
pub fn token_attribute_ratio(doc: &DocumentAnalysis, attribute: TokenAttribute) -> Option<f64> {
    let total = doc.token_count();
    (total > 0).then(|| doc.tokens().filter(|t| attribute.test(t)).count() as f64 / total as f64)
}

fn per_thousand(matches: usize, words: usize) -> Option<f64> {
    (words > 0).then(|| matches as f64 * 1000.0 / words as f64)
}

/// Word-set matches per 1000 words. Phrases are matched within sentences over
/// case-folded word surfaces.
pub fn word_set_incidence(doc: &DocumentAnalysis, set: &WordSet) -> Option<f64> {
    let matches = doc
        .sentences()
        .map(|s| set.count_matches(s.words().map(|t| t.lower.as_str())))
        .sum();
    per_thousand(matches, doc.word_count())
}

/// Words carrying any of `tags`, per 1000 words.
pub fn pos_incidence(doc: &DocumentAnalysis, tags: &[Pos]) -> Option<f64> {
    let matches = doc.words().filter(|t| tags.contains(&t.pos)).count();
    per_thousand(matches, doc.word_count())
}
