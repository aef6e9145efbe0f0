//! Aggregates of word-database values over selected words.

use serde::{Deserialize, Serialize};

use crate::lexicons::{Coverage, WordDatabase};
use crate::pipeline::{DocumentAnalysis, Pos, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    Mean,
    Min,
    Max,
}

/// Which running words a word-property metric looks up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordSelection {
    All,
    Content,
    Pos(Vec<Pos>),
}

impl WordSelection {
    pub fn selects(&self, token: &Token) -> bool {
        match self {
            WordSelection::All => true,
            WordSelection::Content => token.pos.is_content(),
            WordSelection::Pos(tags) => tags.contains(&token.pos),
        }
    }
}

/// Value and coverage of a word-property metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropertyStat {
    pub value: Option<f64>,
    pub coverage: Coverage,
}

/// Looks up every selected word occurrence in the first source whose
/// selection accepts it, then aggregates the values found.
pub fn word_property_multi(
    doc: &DocumentAnalysis,
    sources: &[(&WordSelection, &WordDatabase)],
    aggregate: Aggregate,
) -> PropertyStat {
    let mut coverage = Coverage::default();
    let mut acc: Option<f64> = None;
    let mut found = 0usize;
    for word in doc.words() {
        let Some((_, db)) = sources.iter().find(|(sel, _)| sel.selects(word)) else {
            continue;
        };
        if let Some(v) = db.lookup(word, &mut coverage) {
            found += 1;
            acc = Some(match (acc, aggregate) {
                (None, _) => v,
                (Some(a), Aggregate::Mean) => a + v,
                (Some(a), Aggregate::Min) => a.min(v),
                (Some(a), Aggregate::Max) => a.max(v),
            });
        }
    }
    let value = match aggregate {
        Aggregate::Mean => acc.map(|sum| sum / found as f64),
        _ => acc,
    };
    PropertyStat { value, coverage }
}

/// Aggregated database value over the selected words, weighted by occurrence.
pub fn word_property_stats(
    doc: &DocumentAnalysis,
    db: &WordDatabase,
    aggregate: Aggregate,
    selection: &WordSelection,
) -> PropertyStat {
    word_property_multi(doc, &[(selection, db)], aggregate)
}
