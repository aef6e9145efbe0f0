//! Lexicon-and-rules POS tagger and lemmatizer.
//!
//! Tagging order, first match wins:
//!
//! 1. token class (URL, e-mail, punctuation, symbol, numeric literal);
//! 2. closed-class lexicon;
//! 3. open-class lexicon, directly or through an inflected form of a listed base;
//! 4. suffix and shape rules (capitalized mid-sentence → PROPN, `-ly` → ADV,
//!    `-ing`/`-ed` → VERB, `-ous`/`-ful`/`-able` → ADJ);
//! 5. NOUN.

use super::syllables::count_syllables;
use super::{PipelineResources, Pos, RawToken, Token};

/// Tags and lemmatizes one sentence worth of tokens.
pub fn tag_and_lemmatize(tokens: &[RawToken], resources: &PipelineResources) -> Vec<Token> {
    let first_word = tokens
        .iter()
        .position(|t| !t.flags.is_punct && !t.is_symbol);
    tokens
        .iter()
        .enumerate()
        .map(|(i, raw)| {
            let lower = raw.surface.to_lowercase();
            let pos = tag(raw, &lower, Some(i) == first_word, resources);
            let lemma = lemmatize(&lower, pos, resources);
            let syllables = match pos {
                Pos::Punct | Pos::Sym | Pos::Url | Pos::Email => 0,
                // Numerals and other letterless words count as one syllable.
                _ => count_syllables(&raw.surface, &resources.syllable_exceptions).unwrap_or(1),
            };
            Token {
                letters: raw.surface.chars().filter(|c| c.is_alphabetic()).count() as u32,
                surface: raw.surface.clone(),
                lower,
                lemma,
                pos,
                syllables,
                flags: raw.flags,
            }
        })
        .collect()
}

fn tag(raw: &RawToken, lower: &str, sentence_initial: bool, res: &PipelineResources) -> Pos {
    let flags = raw.flags;
    if flags.is_url {
        return Pos::Url;
    }
    if flags.is_email {
        return Pos::Email;
    }
    if raw.is_symbol {
        return Pos::Sym;
    }
    if flags.is_punct {
        return Pos::Punct;
    }
    if flags.is_digit {
        return Pos::Num;
    }
    if let Some(&pos) = res.closed_class.get(lower) {
        return pos;
    }
    if let Some(pos) = open_class_tag(lower, res) {
        return pos;
    }
    let capitalized = raw.surface.chars().next().is_some_and(char::is_uppercase);
    if capitalized && !sentence_initial {
        return Pos::Propn;
    }
    if lower.len() > 4 && lower.ends_with("ly") {
        return Pos::Adv;
    }
    if (lower.len() > 4 && lower.ends_with("ing")) || (lower.len() > 3 && lower.ends_with("ed")) {
        return Pos::Verb;
    }
    if ["ous", "ful", "able"]
        .iter()
        .any(|s| lower.len() > s.len() + 1 && lower.ends_with(s))
    {
        return Pos::Adj;
    }
    if raw.surface.chars().any(|c| c.is_ascii_digit()) && !raw.surface.chars().any(char::is_alphabetic) {
        return Pos::Num;
    }
    Pos::Noun
}

/// Looks the word up in the open-class lexicon, then tries irregular forms and
/// regular inflections of a listed base.
fn open_class_tag(lower: &str, res: &PipelineResources) -> Option<Pos> {
    if let Some(&pos) = res.open_class.get(lower) {
        return Some(pos);
    }
    if let Some(base) = res.lemma_exceptions.get(lower) {
        if let Some(&pos) = res.open_class.get(base) {
            return Some(pos);
        }
    }
    let known = |w: &str| res.open_class.contains_key(w);
    if let Some(base) = strip_plural(lower, &known) {
        if let Some(&pos @ (Pos::Noun | Pos::Verb)) = res.open_class.get(&base) {
            return Some(pos);
        }
    }
    for suffix in ["ing", "ed"] {
        if let Some(stem) = lower.strip_suffix(suffix) {
            if stem.len() >= 2 && resolve_stem(stem, &known, false).is_some() {
                return Some(Pos::Verb);
            }
        }
    }
    for suffix in ["er", "est"] {
        if let Some(stem) = lower.strip_suffix(suffix) {
            if let Some(base) = resolve_stem(stem, &known, false) {
                if res.open_class.get(&base) == Some(&Pos::Adj) {
                    return Some(Pos::Adj);
                }
            }
        }
    }
    None
}

/// Lemma for a case-folded surface under the given tag.
pub(crate) fn lemmatize(lower: &str, pos: Pos, res: &PipelineResources) -> String {
    let known = |w: &str| res.open_class.contains_key(w) || res.closed_class.contains_key(w);
    match pos {
        Pos::Verb | Pos::Aux | Pos::Noun => {
            if let Some(base) = res.lemma_exceptions.get(lower) {
                return base.clone();
            }
        }
        _ => {}
    }
    let lemma = match pos {
        Pos::Verb => verb_lemma(lower, &known),
        Pos::Noun => strip_plural(lower, &known),
        Pos::Adj => ["est", "er"].iter().find_map(|s| {
            let stem = lower.strip_suffix(s)?;
            resolve_stem(stem, &|w: &str| res.open_class.get(w) == Some(&Pos::Adj), false)
        }),
        _ => None,
    };
    lemma.unwrap_or_else(|| lower.to_string())
}

fn verb_lemma(lower: &str, known: &dyn Fn(&str) -> bool) -> Option<String> {
    if known(lower) {
        return None;
    }
    if let Some(stem) = lower.strip_suffix("ied") {
        if !stem.is_empty() {
            return Some(format!("{stem}y"));
        }
    }
    for suffix in ["ing", "ed"] {
        if let Some(stem) = lower.strip_suffix(suffix) {
            if stem.len() >= 2 && stem.chars().any(|c| "aeiouy".contains(c)) {
                return resolve_stem(stem, known, true);
            }
        }
    }
    strip_plural(lower, known)
}

/// Base form of a `-s`/`-es`/`-ies` inflection.
fn strip_plural(lower: &str, known: &dyn Fn(&str) -> bool) -> Option<String> {
    if lower.len() < 3 || !lower.ends_with('s') || known(lower) {
        return None;
    }
    if lower.ends_with("ss") || lower.ends_with("us") || lower.ends_with("is") {
        return None;
    }
    let one = &lower[..lower.len() - 1];
    if known(one) {
        return Some(one.to_string());
    }
    if let Some(two) = lower.strip_suffix("es") {
        if known(two) {
            return Some(two.to_string());
        }
        if let Some(stem) = lower.strip_suffix("ies") {
            if stem.len() >= 2 {
                return Some(format!("{stem}y"));
            }
        }
        if ["ss", "x", "z", "ch", "sh"].iter().any(|s| two.ends_with(s)) {
            return Some(two.to_string());
        }
    }
    Some(one.to_string())
}

/// Recovers a base from a stem left after removing `-ing`/`-ed`/`-er`/`-est`:
/// the stem itself, the stem with a restored `e`, or the stem with a doubled
/// final consonant undone. With `fallback`, applies spelling heuristics when
/// no candidate is known.
fn resolve_stem(stem: &str, known: &dyn Fn(&str) -> bool, fallback: bool) -> Option<String> {
    if stem.is_empty() {
        return None;
    }
    let with_e = format!("{stem}e");
    let undoubled = doubled_consonant(stem).then(|| stem[..stem.len() - 1].to_string());
    if let Some(u) = undoubled.as_deref().filter(|u| known(u)) {
        return Some(u.to_string());
    }
    if known(stem) {
        return Some(stem.to_string());
    }
    if known(&with_e) {
        return Some(with_e);
    }
    if !fallback {
        return None;
    }
    if let Some(u) = undoubled.filter(|_| !matches!(stem.as_bytes()[stem.len() - 1], b'l' | b's' | b'z')) {
        return Some(u);
    }
    if ["v", "z", "at", "iz", "bl", "dg", "rc", "nc"].iter().any(|s| stem.ends_with(s))
        || stem.ends_with("ur")
    {
        return Some(with_e);
    }
    Some(stem.to_string())
}

fn doubled_consonant(stem: &str) -> bool {
    let b = stem.as_bytes();
    b.len() >= 3 && b[b.len() - 1] == b[b.len() - 2] && !b"aeiouy".contains(&b[b.len() - 1]) && b[b.len() - 1].is_ascii_alphabetic()
}
