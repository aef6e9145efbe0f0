//! Type-token ratio, MTLD and HD-D. Types are case-folded lemmas.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use crate::pipeline::Token;

pub const DEFAULT_MTLD_THRESHOLD: f64 = 0.72;
pub const DEFAULT_HDD_SAMPLE: usize = 42;

/// Distinct lemmas over word count, optionally restricted to content words.
pub fn ttr(words: &[&Token], content_only: bool) -> Option<f64> {
    let selected: Vec<&str> = words
        .iter()
        .filter(|t| !content_only || t.pos.is_content())
        .map(|t| t.lemma.as_str())
        .collect();
    if selected.is_empty() {
        return None;
    }
    let types: HashSet<&str> = selected.iter().copied().collect();
    Some(types.len() as f64 / selected.len() as f64)
}

pub fn mtld(words: &[&Token], threshold: f64) -> Option<f64> {
    let lemmas: Vec<&str> = words.iter().map(|t| t.lemma.as_str()).collect();
    mtld_of(&lemmas, threshold)
}

pub fn hdd(words: &[&Token], sample_size: usize) -> Option<f64> {
    let lemmas: Vec<&str> = words.iter().map(|t| t.lemma.as_str()).collect();
    hdd_of(&lemmas, sample_size)
}

/// Factor count for one MTLD pass: full factors each time the running TTR
/// drops below `threshold`, plus the partial factor `(1 - ttr) / (1 - threshold)`
/// for the unfinished tail.
fn mtld_factors<'a, T: Eq + Hash + 'a>(items: impl Iterator<Item = &'a T>, threshold: f64) -> f64 {
    let mut types: HashSet<&T> = HashSet::new();
    let mut count = 0usize;
    let mut factors = 0.0;
    let mut ttr = 1.0;
    for item in items {
        types.insert(item);
        count += 1;
        ttr = types.len() as f64 / count as f64;
        if ttr < threshold {
            factors += 1.0;
            types.clear();
            count = 0;
            ttr = 1.0;
        }
    }
    if count > 0 {
        factors += (1.0 - ttr) / (1.0 - threshold);
    }
    factors
}

/// MTLD over arbitrary items: mean of the forward and backward `N / factors`.
/// `None` for empty input or when either pass accumulates no factor at all.
pub fn mtld_of<T: Eq + Hash>(items: &[T], threshold: f64) -> Option<f64> {
    let n = items.len();
    if n == 0 {
        return None;
    }
    let forward = mtld_factors(items.iter(), threshold);
    let backward = mtld_factors(items.iter().rev(), threshold);
    if forward <= 0.0 || backward <= 0.0 {
        return None;
    }
    Some((n as f64 / forward + n as f64 / backward) / 2.0)
}

/// HD-D over arbitrary items: sum over types of the probability that the type
/// appears in a random sample of `sample_size` items drawn without
/// replacement, divided by `sample_size`.
pub fn hdd_of<T: Eq + Hash>(items: &[T], sample_size: usize) -> Option<f64> {
    let n = items.len();
    if sample_size == 0 || n < sample_size {
        return None;
    }
    let mut counts: HashMap<&T, usize> = HashMap::new();
    for item in items {
        *counts.entry(item).or_default() += 1;
    }
    // Types sharing a frequency share a probability.
    let mut by_frequency: HashMap<usize, usize> = HashMap::new();
    for &c in counts.values() {
        *by_frequency.entry(c).or_default() += 1;
    }
    let mut freqs: Vec<(usize, usize)> = by_frequency.into_iter().collect();
    freqs.sort_unstable();
    let total: f64 = freqs
        .iter()
        .map(|&(freq, types)| types as f64 * (1.0 - absent_probability(n, freq, sample_size)))
        .sum();
    Some(total / sample_size as f64)
}

/// `C(n - k, s) / C(n, s)`, evaluated in log space.
fn absent_probability(n: usize, k: usize, s: usize) -> f64 {
    if n - k < s {
        return 0.0;
    }
    let log: f64 = (0..s)
        .map(|i| ((n - k - i) as f64).ln() - ((n - i) as f64).ln())
        .sum();
    log.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mtld_identical_tokens() {
        assert_eq!(mtld_of(&["a"; 8], 0.72), Some(2.0));
        // 4 full factors, then a 1-token tail with TTR 1 adds nothing.
        assert_eq!(mtld_of(&["a"; 9], 0.72), Some(9.0 / 4.0));
    }

    #[test]
    fn mtld_guards() {
        let distinct: Vec<usize> = (0..12).collect();
        assert_eq!(mtld_of(&distinct, 0.72), None);
        assert_eq!(mtld_of(&(0..9).collect::<Vec<_>>(), 0.72), None);
        assert_eq!(mtld_of::<u8>(&[], 0.72), None);
    }

    #[test]
    fn hdd_closed_forms() {
        assert!((hdd_of(&["x"; 42], 42).unwrap() - 1.0 / 42.0).abs() < 1e-12);
        let distinct: Vec<usize> = (0..42).collect();
        assert!((hdd_of(&distinct, 42).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(hdd_of(&(0..41).collect::<Vec<_>>(), 42), None);
    }

    #[test]
    fn hdd_two_types_by_hand() {
        // N = 4, s = 2, types a×3, b×1.
        // P(a absent) = C(1,2)/C(4,2) = 0, P(b absent) = C(3,2)/C(4,2) = 1/2.
        // HDD = (1 + 1/2) / 2 = 0.75
        assert!((hdd_of(&["a", "a", "a", "b"], 2).unwrap() - 0.75).abs() < 1e-12);
    }
}
