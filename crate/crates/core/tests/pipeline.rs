use std::collections::HashMap;

use proptest::prelude::*;
use tct_core::lexicons::Lexicons;
use tct_core::metrics::syntax::{
    left_embeddedness, noun_phrase_modifiers, np_modifiers, sentence_edit_distances, syntax_similarity,
    SimilarityMode,
};
use tct_core::metrics::{MetricRegistry, MetricSet, Selection};
use tct_core::pipeline::{count_syllables, split_paragraphs, DocumentAnalysis, Pos};

fn set() -> MetricSet {
    MetricRegistry::with_defaults()
        .initialize(&Lexicons::bundled().unwrap(), &Selection::Keys(vec!["DESWC".into()]))
        .unwrap()
}

fn analyze(text: &str) -> DocumentAnalysis {
    set().pipeline().analyze(text)
}

fn surfaces(doc: &DocumentAnalysis) -> Vec<Vec<String>> {
    doc.sentences()
        .map(|s| s.tokens.iter().map(|t| t.surface.clone()).collect())
        .collect()
}

#[test]
fn paragraphs_split_on_blank_lines_only() {
    assert_eq!(split_paragraphs("A.\n\nB."), ["A.", "B."]);
    assert_eq!(split_paragraphs("A.\nB."), ["A.\nB."]);
    assert!(split_paragraphs("  \n\n  ").is_empty());
}

#[test]
fn sentences_respect_abbreviations_and_decimals() {
    assert_eq!(analyze("He ran. She sat.").sentence_count(), 2);
    assert_eq!(analyze("Dr. Smith left.").sentence_count(), 1);
    assert_eq!(analyze("Pi is 3.14 today. Yes.").sentence_count(), 2);
    assert_eq!(analyze("").sentence_count(), 0);
}

#[test]
fn tokens_and_flags() {
    let doc = analyze("Visit http://x.com now!");
    assert_eq!(surfaces(&doc), [["Visit", "http://x.com", "now", "!"]]);
    let urls = doc.tokens().filter(|t| t.flags.is_url).count();
    assert_eq!(urls, 1);

    let doc = analyze("3.14 rocks");
    let first = doc.tokens().next().unwrap();
    assert_eq!(first.surface, "3.14");
    assert!(first.flags.is_digit);
}

#[test]
fn tags_and_lemmas() {
    let doc = analyze("She runs quickly");
    let tags: Vec<(Pos, &str)> = doc.tokens().map(|t| (t.pos, t.lemma.as_str())).collect();
    assert_eq!(tags, [(Pos::Pron, "she"), (Pos::Verb, "run"), (Pos::Adv, "quickly")]);
    assert_eq!(analyze("the").tokens().next().unwrap().pos, Pos::Det);
    assert_eq!(analyze("Blorptastic").tokens().next().unwrap().pos, Pos::Noun);
}

#[test]
fn syllable_examples() {
    let none = HashMap::new();
    assert_eq!(count_syllables("cat", &none).unwrap(), 1);
    assert_eq!(count_syllables("table", &none).unwrap(), 2);
    assert_eq!(count_syllables("I", &none).unwrap(), 1);
    assert!(count_syllables("42", &none).is_err());
}

#[test]
fn syntactic_examples() {
    let doc = analyze("The old dog barked.");
    let s: Vec<_> = doc.sentences().collect();
    assert_eq!(left_embeddedness(&s), Some(3.0));
    assert_eq!(left_embeddedness(&analyze("Stop!").sentences().collect::<Vec<_>>()), Some(0.0));
    assert_eq!(left_embeddedness(&analyze("No verbs here.").sentences().collect::<Vec<_>>()), None);

    let doc = analyze("The big red dog ran");
    assert_eq!(noun_phrase_modifiers(&doc.sentences().next().unwrap().tokens), [2]);
    let doc = analyze("Dogs ran");
    assert_eq!(noun_phrase_modifiers(&doc.sentences().next().unwrap().tokens), [0]);
    assert_eq!(np_modifiers(&analyze("Quickly!").sentences().collect::<Vec<_>>()), None);
}

#[test]
fn edit_distance_and_similarity_examples() {
    let doc = analyze("Ants bite cats. Ants bite dogs.");
    let s: Vec<_> = doc.sentences().collect();
    assert_eq!(s.len(), 2);
    assert_eq!(sentence_edit_distances(&s).unwrap().words, 1.0);

    let doc = analyze("The cat sat. The cat sat.");
    let s: Vec<_> = doc.sentences().collect();
    assert_eq!(sentence_edit_distances(&s).unwrap().words, 0.0);
    assert_eq!(syntax_similarity(&s, SimilarityMode::Adjacent), Some(1.0));

    let one = analyze("Alone here.");
    assert!(sentence_edit_distances(&one.sentences().collect::<Vec<_>>()).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every non-whitespace character of the input lands in some token.
    #[test]
    fn tokens_cover_the_text(words in prop::collection::vec("[A-Za-z]{1,8}[.,!?]?", 0..30)) {
        let text = words.join(" ");
        let doc = analyze(&text);
        let joined: String = doc.tokens().map(|t| t.surface.as_str()).collect();
        let stripped: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        prop_assert_eq!(joined, stripped);
    }

    #[test]
    fn syllables_are_at_least_one(word in "[a-zA-Z]{1,20}") {
        prop_assert!(count_syllables(&word, &HashMap::new()).unwrap() >= 1);
    }
}
