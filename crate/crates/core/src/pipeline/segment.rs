//! Paragraph and sentence segmentation.

use super::PipelineResources;

/// Splits on runs of blank (whitespace-only) lines. Paragraphs are trimmed and
/// empty ones dropped; a single newline is not a boundary.
pub fn split_paragraphs(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut end = 0;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        if line.trim().is_empty() {
            if let Some(s) = start.take() {
                push_trimmed(&mut out, &text[s..end]);
            }
        } else {
            start.get_or_insert(line_start);
            end = offset;
        }
    }
    if let Some(s) = start {
        push_trimmed(&mut out, &text[s..end]);
    }
    out
}

fn push_trimmed<'a>(out: &mut Vec<&'a str>, s: &'a str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s);
    }
}

const TERMINALS: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 6] = ['"', '\'', '\u{201d}', '\u{2019}', ')', ']'];
const OPENERS: [char; 6] = ['"', '\'', '\u{201c}', '\u{2018}', '(', '['];

/// Rule-based sentence splitter.
///
/// A boundary sits after a run of `.`, `!` or `?` (plus any closing quotes or
/// brackets) that is followed by whitespace and then an uppercase letter, a
/// digit or an opening quote. A lone period after a listed abbreviation or a
/// single-letter initial does not end a sentence.
pub fn split_sentences<'a>(paragraph: &'a str, resources: &PipelineResources) -> Vec<&'a str> {
    let chars: Vec<(usize, char)> = paragraph.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !TERMINALS.contains(&c) {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut j = i;
        while j < chars.len() && TERMINALS.contains(&chars[j].1) {
            j += 1;
        }
        let single_period = j - run_start == 1 && c == '.';
        while j < chars.len() && CLOSERS.contains(&chars[j].1) {
            j += 1;
        }
        let boundary_byte = chars.get(j).map_or(paragraph.len(), |&(b, _)| b);
        let mut k = j;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        let is_boundary = if k == chars.len() {
            // End of paragraph: the remainder is flushed below.
            false
        } else if k == j {
            false
        } else {
            let next = chars[k].1;
            let starts_sentence =
                next.is_uppercase() || next.is_ascii_digit() || OPENERS.contains(&next);
            starts_sentence
                && !(single_period && precedes_abbreviation(paragraph, chars[run_start].0, resources))
        };
        if is_boundary {
            push_trimmed(&mut out, &paragraph[start..boundary_byte]);
            start = boundary_byte;
        }
        i = j.max(i + 1);
    }
    push_trimmed(&mut out, &paragraph[start..]);
    out
}

/// Whether the word ending right before the period at `period_byte` is an
/// abbreviation or a single-letter initial.
fn precedes_abbreviation(text: &str, period_byte: usize, resources: &PipelineResources) -> bool {
    let before = &text[..period_byte];
    let word_start = before
        .rfind(char::is_whitespace)
        .map_or(0, |p| p + before[p..].chars().next().map_or(1, char::len_utf8));
    let word = before[word_start..].trim_start_matches(|c: char| OPENERS.contains(&c));
    if word.is_empty() {
        return false;
    }
    let mut letters = word.chars();
    let single_initial = matches!((letters.next(), letters.next()), (Some(c), None) if c.is_alphabetic());
    single_initial || resources.is_abbreviation(word)
}
