use std::collections::{HashMap, HashSet};

use super::Pos;
use crate::error::{Error, Result};

/// Word lists consumed by the segmenter, tagger, lemmatizer and syllable counter.
///
/// Immutable after loading; shared across threads by reference.
#[derive(Clone, Debug, Default)]
pub struct PipelineResources {
    /// Lowercase abbreviations without their final period (`dr`, `e.g`).
    pub abbreviations: HashSet<String>,
    pub closed_class: HashMap<String, Pos>,
    pub open_class: HashMap<String, Pos>,
    pub lemma_exceptions: HashMap<String, String>,
    pub syllable_exceptions: HashMap<String, u32>,
}

impl PipelineResources {
    pub fn from_texts(
        abbreviations: &str,
        closed_class: &str,
        open_class: &str,
        lemma_exceptions: &str,
        syllable_exceptions: &str,
    ) -> Result<Self> {
        Ok(PipelineResources {
            abbreviations: parse_list(abbreviations)
                .map(|(_, w)| w.trim_end_matches('.').to_string())
                .collect(),
            closed_class: parse_tag_table(closed_class, "closed_class")?,
            open_class: parse_tag_table(open_class, "open_class")?,
            lemma_exceptions: parse_pairs(lemma_exceptions, "lemma_exceptions")?
                .into_iter()
                .fold(HashMap::new(), |mut m, (_, (k, v))| {
                    m.entry(k).or_insert(v);
                    m
                }),
            syllable_exceptions: parse_pairs(syllable_exceptions, "syllable_exceptions")?
                .into_iter()
                .map(|(line, (w, v))| {
                    v.parse::<u32>()
                        .ok()
                        .filter(|n| *n > 0)
                        .map(|n| (w, n))
                        .ok_or_else(|| Error::Parse {
                            origin: "syllable_exceptions".into(),
                            line,
                            message: format!("invalid syllable count `{v}`"),
                        })
                })
                .collect::<Result<_>>()?,
        })
    }

    pub fn is_abbreviation(&self, word_without_period: &str) -> bool {
        self.abbreviations
            .contains(&word_without_period.to_lowercase())
    }
}

fn parse_list(text: &str) -> impl Iterator<Item = (usize, String)> + '_ {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.to_lowercase()))
    })
}

/// Two-column TSV with a header line.
fn parse_pairs(text: &str, origin: &str) -> Result<Vec<(usize, (String, String))>> {
    parse_list(text)
        .skip(1)
        .map(|(line, l)| {
            let mut cols = l.split('\t');
            match (cols.next(), cols.next()) {
                (Some(a), Some(b)) if !a.is_empty() => {
                    Ok((line, (a.trim().to_string(), b.trim().to_string())))
                }
                _ => Err(Error::Parse {
                    origin: origin.to_string(),
                    line,
                    message: "expected two tab-separated columns".into(),
                }),
            }
        })
        .collect()
}

fn parse_tag_table(text: &str, origin: &str) -> Result<HashMap<String, Pos>> {
    let mut out = HashMap::new();
    for (line, (word, tag)) in parse_pairs(text, origin)? {
        let pos = tag.parse::<Pos>().map_err(|message| Error::Parse {
            origin: origin.to_string(),
            line,
            message,
        })?;
        // First entry wins: lists are ordered by frequency.
        out.entry(word).or_insert(pos);
    }
    Ok(out)
}
