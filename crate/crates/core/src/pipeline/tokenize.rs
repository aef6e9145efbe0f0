//! Whitespace tokenizer with URL/e-mail recognition and punctuation peeling.

use std::sync::LazyLock;

use regex::Regex;

use super::{PipelineResources, RawToken, TokenFlags};

static URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:[A-Za-z][A-Za-z0-9+.\-]*://[^\s]+|www\.[^\s]+\.[^\s]+)$").expect("url regex")
});
static EMAIL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}$")
        .expect("email regex")
});

/// Characters classified as symbols rather than punctuation.
const SYMBOLS: &str = "$%&+=<>#@^*~|`\u{20ac}\u{a3}\u{a5}\u{a9}\u{ae}\u{b0}\u{a7}\u{b1}\u{d7}\u{f7}";

pub(crate) fn is_symbol_char(c: char) -> bool {
    SYMBOLS.contains(c)
}

fn is_edge_char(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Splits a sentence into surface tokens.
///
/// URLs (`scheme://…` or `www.…`) and e-mail addresses are recognised first
/// and kept whole. Everything else is split on whitespace and leading and
/// trailing non-alphanumeric characters are peeled off as separate tokens, one
/// per run of identical characters. Internal apostrophes, hyphens and decimal
/// points stay inside their token. A trailing period stays attached to a known
/// abbreviation or to dotted initialisms such as `U.S.`.
pub fn tokenize(sentence: &str, resources: &PipelineResources) -> Vec<RawToken> {
    let mut out = Vec::new();
    for chunk in sentence.split_whitespace() {
        tokenize_chunk(chunk, resources, &mut out);
    }
    out
}

fn tokenize_chunk(chunk: &str, resources: &PipelineResources, out: &mut Vec<RawToken>) {
    let core_start = chunk
        .char_indices()
        .find(|&(_, c)| !is_edge_char(c))
        .map(|(i, _)| i);
    let Some(core_start) = core_start else {
        push_runs(chunk, out);
        return;
    };
    let core_end = chunk
        .char_indices()
        .rev()
        .find(|&(_, c)| !is_edge_char(c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(chunk.len());

    // URLs and e-mails may legitimately end in `/` or start with characters we
    // would otherwise peel, so test a looser trim first.
    if let Some(special) = special_span(chunk) {
        let (lead, span, trail) = special;
        push_runs(lead, out);
        out.push(span);
        push_runs(trail, out);
        return;
    }

    let mut core_end = core_end;
    let trailing = &chunk[core_end..];
    if trailing.starts_with('.') {
        let core = &chunk[core_start..core_end];
        if resources.is_abbreviation(core) || is_initialism(core) {
            core_end += 1;
        }
    }
    push_runs(&chunk[..core_start], out);
    out.push(classify(&chunk[core_start..core_end]));
    push_runs(&chunk[core_end..], out);
}

/// `U.S`, `e.g` and similar: single letters separated by periods.
fn is_initialism(core: &str) -> bool {
    let parts: Vec<&str> = core.split('.').collect();
    parts.len() >= 2
        && parts
            .iter()
            .all(|p| p.chars().count() == 1 && p.chars().all(char::is_alphabetic))
}

const SPECIAL_LEAD: &[char] = &['(', '<', '[', '"', '\'', '\u{201c}', '\u{2018}'];
const SPECIAL_TRAIL: &[char] = &[
    '.', ',', ';', ':', '!', '?', ')', '>', ']', '"', '\'', '\u{201d}', '\u{2019}',
];

fn special_span(chunk: &str) -> Option<(&str, RawToken, &str)> {
    if !(chunk.contains("://") || chunk.contains("www.") || chunk.contains('@')) {
        return None;
    }
    let inner = chunk.trim_start_matches(SPECIAL_LEAD);
    let lead = &chunk[..chunk.len() - inner.len()];
    let core = inner.trim_end_matches(SPECIAL_TRAIL);
    let trail = &inner[core.len()..];
    let flags = if URL.is_match(core) {
        TokenFlags {
            is_url: true,
            ..TokenFlags::default()
        }
    } else if EMAIL.is_match(core) {
        TokenFlags {
            is_email: true,
            ..TokenFlags::default()
        }
    } else {
        return None;
    };
    Some((
        lead,
        RawToken {
            surface: core.to_string(),
            flags,
            is_symbol: false,
        },
        trail,
    ))
}

/// Emits one token per run of identical characters.
fn push_runs(s: &str, out: &mut Vec<RawToken>) {
    let mut chars = s.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        let mut end = start + c.len_utf8();
        while let Some(&(i, d)) = chars.peek() {
            if d != c {
                break;
            }
            end = i + d.len_utf8();
            chars.next();
        }
        out.push(classify(&s[start..end]));
    }
}

fn classify(surface: &str) -> RawToken {
    let is_symbol = surface.chars().all(is_symbol_char);
    let flags = TokenFlags {
        is_alpha: surface.chars().all(char::is_alphabetic),
        is_digit: is_numeric_literal(surface),
        is_punct: !is_symbol && surface.chars().all(|c| is_edge_char(c) && !is_symbol_char(c)),
        is_url: false,
        is_email: false,
    };
    RawToken {
        surface: surface.to_string(),
        flags,
        is_symbol,
    }
}

/// Digits with optional single-character separators (`,` or `.`) between digit groups.
pub(crate) fn is_numeric_literal(s: &str) -> bool {
    s.split([',', '.'])
        .all(|group| !group.is_empty() && group.bytes().all(|b| b.is_ascii_digit()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(s: &str) -> Vec<String> {
        let mut r = PipelineResources::default();
        r.abbreviations.insert("dr".into());
        tokenize(s, &r).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn url_is_one_token() {
        let r = PipelineResources::default();
        let toks = tokenize("Visit http://x.com now!", &r);
        let s: Vec<_> = toks.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(s, ["Visit", "http://x.com", "now", "!"]);
        assert_eq!(toks.iter().filter(|t| t.flags.is_url).count(), 1);
        assert!(toks[3].flags.is_punct);
    }

    #[test]
    fn decimal_kept_whole() {
        let r = PipelineResources::default();
        let toks = tokenize("3.14 rocks", &r);
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].surface, "3.14");
        assert!(toks[0].flags.is_digit);
        assert!(!toks[1].flags.is_digit);
        assert!(tokenize("", &r).is_empty());
    }

    #[test]
    fn contractions_and_hyphens() {
        assert_eq!(surfaces("I don't like state-of-the-art tools."), [
            "I", "don't", "like", "state-of-the-art", "tools", "."
        ]);
        assert_eq!(surfaces("(\"Hello,\" she said...)"), [
            "(", "\"", "Hello", ",", "\"", "she", "said", "...", ")"
        ]);
    }

    #[test]
    fn email_and_www() {
        let r = PipelineResources::default();
        let toks = tokenize("Mail bob.s@ex-ample.co.uk or see (www.site.org).", &r);
        let s: Vec<_> = toks.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(s, ["Mail", "bob.s@ex-ample.co.uk", "or", "see", "(", "www.site.org", ")", "."]);
        assert!(toks[1].flags.is_email);
        assert!(toks[5].flags.is_url);
        // not an address
        assert_eq!(surfaces("@home"), ["@", "home"]);
    }

    #[test]
    fn abbreviations_keep_period() {
        assert_eq!(surfaces("Dr. Who and the U.S. team"), ["Dr.", "Who", "and", "the", "U.S.", "team"]);
        assert_eq!(surfaces("$5 or 50%"), ["$", "5", "or", "50", "%"]);
    }

    #[test]
    fn numeric_literals() {
        for s in ["0", "42", "3.14", "1,000", "1,000.5"] {
            assert!(is_numeric_literal(s), "{s}");
        }
        for s in ["", "1.", ".5", "1..2", "12a", "a1"] {
            assert!(!is_numeric_literal(s), "{s}");
        }
    }
}
