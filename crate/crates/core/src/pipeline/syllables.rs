//! Heuristic English syllable counting.

use std::collections::HashMap;

use crate::error::{Error, Result};

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Counts syllables in a word.
///
/// Exceptions take precedence. Otherwise each alphabetic segment contributes
/// its number of maximal vowel groups (`a e i o u y`), minus one for a final
/// silent `e` (kept for a final `le` after a consonant, as in "table", and never
/// taking a segment below one). The total is floored at 1.
pub fn count_syllables(word: &str, exceptions: &HashMap<String, u32>) -> Result<u32> {
    if !word.chars().any(char::is_alphabetic) {
        return Err(Error::InvalidInput(format!(
            "`{word}` has no alphabetic characters"
        )));
    }
    let lower = word.to_lowercase();
    if let Some(&n) = exceptions.get(&lower) {
        return Ok(n);
    }
    let total: u32 = lower
        .split(|c: char| !c.is_alphabetic())
        .filter(|seg| !seg.is_empty())
        .map(segment_syllables)
        .sum();
    Ok(total.max(1))
}

fn segment_syllables(seg: &str) -> u32 {
    let chars: Vec<char> = seg.chars().collect();
    let mut groups = 0u32;
    let mut prev_vowel = false;
    for &c in &chars {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = chars.len();
    if n >= 2 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) {
        let consonant_le = n >= 3 && chars[n - 2] == 'l' && !is_vowel(chars[n - 3]);
        if !consonant_le && groups > 1 {
            groups -= 1;
        }
    }
    groups
}
