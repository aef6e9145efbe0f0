//! Left embeddedness, noun-phrase modifiers, inter-sentence edit distances and
//! a POS-sequence proxy for sentence syntax similarity.

use crate::pipeline::{Pos, Sentence, Token};
use crate::stats::mean;

/// Unit-cost Levenshtein distance between two sequences.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Mean number of words before the first non-auxiliary verb. Sentences
/// without such a verb are left out.
pub fn left_embeddedness(sentences: &[&Sentence]) -> Option<f64> {
    let counts: Vec<f64> = sentences
        .iter()
        .filter_map(|s| {
            let words: Vec<&Token> = s.words().collect();
            words.iter().position(|t| t.pos == Pos::Verb).map(|i| i as f64)
        })
        .collect();
    mean(&counts)
}

/// Modifier counts of the noun phrases in one sentence.
///
/// A noun phrase is a maximal run `DET? (ADJ|NOUN|PROPN)* (NOUN|PROPN)`. Its
/// modifiers are the adjectives plus every noun before the head; the
/// determiner does not count.
pub fn noun_phrase_modifiers(tokens: &[Token]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let start = if tokens[i].pos == Pos::Det { i + 1 } else { i };
        let mut end = start;
        while end < tokens.len() && matches!(tokens[end].pos, Pos::Adj | Pos::Noun | Pos::Propn) {
            end += 1;
        }
        let head = tokens[start..end].iter().rposition(|t| t.pos.is_noun());
        match head {
            Some(h) => {
                out.push(h); // tokens before the head, all of them ADJ or NOUN/PROPN
                i = start + h + 1;
            }
            None => i = end.max(i + 1),
        }
    }
    out
}

pub fn np_modifiers(sentences: &[&Sentence]) -> Option<f64> {
    let counts: Vec<f64> = sentences
        .iter()
        .flat_map(|s| noun_phrase_modifiers(&s.tokens))
        .map(|n| n as f64)
        .collect();
    mean(&counts)
}

/// Mean edit distances between adjacent sentences over case-folded surfaces,
/// lemmas and POS tags of their words.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EditDistances {
    pub words: f64,
    pub lemmas: f64,
    pub pos: f64,
}

pub fn sentence_edit_distances(sentences: &[&Sentence]) -> Option<EditDistances> {
    if sentences.len() < 2 {
        return None;
    }
    let words: Vec<Vec<&Token>> = sentences.iter().map(|s| s.words().collect()).collect();
    let mut sums = [0.0; 3];
    for pair in words.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        fn surf<'a>(s: &[&'a Token]) -> Vec<&'a str> {
            s.iter().map(|t| t.lower.as_str()).collect()
        }
        fn lem<'a>(s: &[&'a Token]) -> Vec<&'a str> {
            s.iter().map(|t| t.lemma.as_str()).collect()
        }
        let tags = |s: &[&Token]| s.iter().map(|t| t.pos).collect::<Vec<_>>();
        sums[0] += levenshtein(&surf(a), &surf(b)) as f64;
        sums[1] += levenshtein(&lem(a), &lem(b)) as f64;
        sums[2] += levenshtein(&tags(a), &tags(b)) as f64;
    }
    let pairs = (words.len() - 1) as f64;
    Some(EditDistances {
        words: sums[0] / pairs,
        lemmas: sums[1] / pairs,
        pos: sums[2] / pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimilarityMode {
    Adjacent,
    AllPairs,
}

/// `1 - lev(a, b) / max(|a|, |b|)` over word POS sequences; two empty
/// sequences are identical.
pub fn pos_similarity(a: &[Pos], b: &[Pos]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

pub fn syntax_similarity(sentences: &[&Sentence], mode: SimilarityMode) -> Option<f64> {
    if sentences.len() < 2 {
        return None;
    }
    let seqs: Vec<Vec<Pos>> = sentences
        .iter()
        .map(|s| s.words().map(|t| t.pos).collect())
        .collect();
    let sims: Vec<f64> = match mode {
        SimilarityMode::Adjacent => seqs.windows(2).map(|w| pos_similarity(&w[0], &w[1])).collect(),
        SimilarityMode::AllPairs => (0..seqs.len())
            .flat_map(|i| (i + 1..seqs.len()).map(move |j| (i, j)))
            .map(|(i, j)| pos_similarity(&seqs[i], &seqs[j]))
            .collect(),
    };
    mean(&sims)
}
