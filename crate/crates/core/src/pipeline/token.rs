use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Coarse part-of-speech tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Propn,
    Verb,
    Aux,
    Adj,
    Adv,
    Pron,
    Det,
    Adp,
    Conj,
    Num,
    Part,
    Punct,
    Sym,
    Url,
    Email,
    X,
}

impl Pos {
    pub const ALL: [Pos; 17] = [
        Pos::Noun,
        Pos::Propn,
        Pos::Verb,
        Pos::Aux,
        Pos::Adj,
        Pos::Adv,
        Pos::Pron,
        Pos::Det,
        Pos::Adp,
        Pos::Conj,
        Pos::Num,
        Pos::Part,
        Pos::Punct,
        Pos::Sym,
        Pos::Url,
        Pos::Email,
        Pos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Propn => "PROPN",
            Pos::Verb => "VERB",
            Pos::Aux => "AUX",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Pron => "PRON",
            Pos::Det => "DET",
            Pos::Adp => "ADP",
            Pos::Conj => "CONJ",
            Pos::Num => "NUM",
            Pos::Part => "PART",
            Pos::Punct => "PUNCT",
            Pos::Sym => "SYM",
            Pos::Url => "URL",
            Pos::Email => "EMAIL",
            Pos::X => "X",
        }
    }

    /// NOUN, PROPN, VERB, ADJ and ADV: the tags every "content words" metric selects.
    pub fn is_content(self) -> bool {
        matches!(self, Pos::Noun | Pos::Propn | Pos::Verb | Pos::Adj | Pos::Adv)
    }

    pub fn is_noun(self) -> bool {
        matches!(self, Pos::Noun | Pos::Propn)
    }

    /// Whether tokens with this tag count as words.
    pub fn is_word(self) -> bool {
        !matches!(self, Pos::Punct | Pos::Sym | Pos::Url | Pos::Email)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .iter()
            .copied()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown POS tag `{s}`"))
    }
}

/// Character-class flags assigned by the tokenizer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenFlags {
    /// Every character is alphabetic.
    pub is_alpha: bool,
    /// A numeric literal: digits, optionally grouped or with a decimal point (`1,000`, `3.14`).
    pub is_digit: bool,
    /// Every character is punctuation.
    pub is_punct: bool,
    pub is_url: bool,
    pub is_email: bool,
}

/// A surface token as produced by [`tokenize`](super::tokenize), before tagging.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawToken {
    pub surface: String,
    pub flags: TokenFlags,
    /// Made only of symbol characters such as `$`, `%` or `+`.
    pub is_symbol: bool,
}

/// A tagged, lemmatized token.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Case-folded surface.
    pub lower: String,
    /// Case-folded lemma.
    pub lemma: String,
    pub pos: Pos,
    pub syllables: u32,
    /// Alphabetic characters in the surface.
    pub letters: u32,
    pub flags: TokenFlags,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.pos.is_word()
    }
}
