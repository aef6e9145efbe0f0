//! Deterministic English text analysis: paragraphs, sentences, tokens, tags,
//! lemmas and syllables.
//!
//! Every metric is defined relative to the output of this pipeline.

mod resources;
mod segment;
mod syllables;
mod tagger;
mod token;
mod tokenize;

use std::sync::Arc;

use serde::Serialize;

pub use resources::PipelineResources;
pub use segment::{split_paragraphs, split_sentences};
pub use syllables::count_syllables;
pub use tagger::tag_and_lemmatize;
pub use token::{Pos, RawToken, Token, TokenFlags};
pub use tokenize::tokenize;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn words(&self) -> impl Iterator<Item = &Token> + '_ {
        self.tokens.iter().filter(|t| t.is_word())
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Paragraph {
    pub sentences: Vec<Sentence>,
}

impl Paragraph {
    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }
}

/// Pipeline output for one text fragment.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DocumentAnalysis {
    pub paragraphs: Vec<Paragraph>,
}

impl DocumentAnalysis {
    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> + '_ {
        self.paragraphs.iter().flat_map(|p| p.sentences.iter())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> + '_ {
        self.sentences().flat_map(|s| s.tokens.iter())
    }

    /// Tokens that count as words: everything except punctuation, symbols,
    /// URLs and e-mail addresses.
    pub fn words(&self) -> impl Iterator<Item = &Token> + '_ {
        self.tokens().filter(|t| t.is_word())
    }

    pub fn content_words(&self) -> impl Iterator<Item = &Token> + '_ {
        self.words().filter(|t| t.pos.is_content())
    }

    pub fn sentence_count(&self) -> usize {
        self.paragraphs.iter().map(|p| p.sentences.len()).sum()
    }

    pub fn token_count(&self) -> usize {
        self.sentences().map(|s| s.tokens.len()).sum()
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }
}

/// The text analysis pipeline bound to its word lists.
#[derive(Clone, Debug)]
pub struct Pipeline {
    resources: Arc<PipelineResources>,
}

impl Pipeline {
    pub fn new(resources: Arc<PipelineResources>) -> Self {
        Pipeline { resources }
    }

    pub fn resources(&self) -> &PipelineResources {
        &self.resources
    }

    pub fn analyze(&self, text: &str) -> DocumentAnalysis {
        let res = &*self.resources;
        let paragraphs = split_paragraphs(text)
            .into_iter()
            .map(|p| Paragraph {
                sentences: split_sentences(p, res)
                    .into_iter()
                    .map(|s| Sentence {
                        tokens: tag_and_lemmatize(&tokenize(s, res), res),
                    })
                    .filter(|s| !s.tokens.is_empty())
                    .collect(),
            })
            .collect();
        DocumentAnalysis { paragraphs }
    }
}
