//! Language-independent text primitives: tokenization, syllable counting,
//! entropy and bigram statistics, readability indices, casing fractions,
//! string similarity, elongated words, entity extraction and language
//! identification.

mod entities;
mod lang;

pub use entities::{extract_entities, EntitySet, Extraction};
pub use lang::{LanguageDetector, NgramProfileDetector};

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

/// Tokenized view of a text: words, sentences and per-word syllable counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedText {
    pub raw: String,
    pub words: Vec<String>,
    pub sentences: Vec<String>,
    pub syllable_counts: Vec<usize>,
}

/// The nine readability indices plus the difficult-word count.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Readability {
    pub flesch_reading_ease: f64,
    pub flesch_kincaid_grade: f64,
    pub smog_index: f64,
    pub coleman_liau_index: f64,
    pub automated_readability_index: f64,
    pub dale_chall_readability_score: f64,
    pub difficult_words: f64,
    pub linsear_write_formula: f64,
    pub gunning_fog: f64,
    /// True when the text had zero words or zero sentences; every index is 0.
    pub degenerate: bool,
}

impl Readability {
    pub fn as_array(&self) -> [f64; 9] {
        [
            self.flesch_reading_ease,
            self.flesch_kincaid_grade,
            self.smog_index,
            self.coleman_liau_index,
            self.automated_readability_index,
            self.dale_chall_readability_score,
            self.difficult_words,
            self.linsear_write_formula,
            self.gunning_fog,
        ]
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Split into words (maximal runs of letters/digits/apostrophes) and
/// sentences (terminated by '.', '!' or '?' followed by whitespace or end).
pub fn tokenize(text: &str) -> TokenizedText {
    let mut words = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if is_word_char(c) {
            current.push(c);
        } else if !current.is_empty() {
            words.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }

    let mut sentences = Vec::new();
    let mut sentence = String::new();
    let chars: Vec<char> = text.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        sentence.push(c);
        let terminal = matches!(c, '.' | '!' | '?');
        let boundary = terminal
            && chars
                .get(i + 1)
                .map_or(true, |next| next.is_whitespace());
        if boundary {
            let trimmed = sentence.trim();
            if trimmed.chars().any(is_word_char) {
                sentences.push(trimmed.to_string());
            }
            sentence.clear();
        }
    }
    let trimmed = sentence.trim();
    if trimmed.chars().any(is_word_char) {
        sentences.push(trimmed.to_string());
    }

    let syllable_counts = words.iter().map(|w| count_syllables(w)).collect();
    TokenizedText {
        raw: text.to_string(),
        words,
        sentences,
        syllable_counts,
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group heuristic: count maximal vowel runs, subtract a silent
/// trailing 'e', minimum 1 for any non-empty word.
pub fn count_syllables(word: &str) -> usize {
    let w: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(|c| c.to_lowercase())
        .collect();
    if w.is_empty() {
        // Numeric tokens are pronounced; count them as one syllable.
        return usize::from(!word.is_empty());
    }
    let mut runs = 0usize;
    let mut in_run = false;
    for &c in &w {
        if is_vowel(c) {
            if !in_run {
                runs += 1;
            }
            in_run = true;
        } else {
            in_run = false;
        }
    }
    // Trailing lone 'e' is usually silent ("cake"), unless it is the only
    // vowel group ("the").
    if runs > 1 && w.len() >= 2 && w[w.len() - 1] == 'e' && !is_vowel(w[w.len() - 2]) {
        runs -= 1;
    }
    runs.max(1)
}

/// Shannon entropy of the character distribution, in bits per character.
pub fn shannon_entropy(text: &str) -> f64 {
    let mut counts: BTreeMap<char, f64> = BTreeMap::new();
    let mut total = 0.0;
    for c in text.chars() {
        *counts.entry(c).or_insert(0.0) += 1.0;
        total += 1.0;
    }
    if total == 0.0 {
        return 0.0;
    }
    -counts
        .values()
        .map(|&n| {
            let p = n / total;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Mean, over bigram occurrences, of each bigram's relative frequency within
/// the string. Strings shorter than two characters yield 0.
pub fn mean_bigram_freq(text: &str) -> f64 {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < 2 {
        return 0.0;
    }
    let total = (chars.len() - 1) as f64;
    let mut counts: BTreeMap<(char, char), f64> = BTreeMap::new();
    for pair in chars.windows(2) {
        *counts.entry((pair[0], pair[1])).or_insert(0.0) += 1.0;
    }
    // Sum over occurrences of freq(bigram) = sum over distinct of count^2/total.
    counts.values().map(|&c| c * c / total).sum::<f64>() / total
}

/// Fractions of all-lowercase, all-uppercase and titlecase words among the
/// alphabetic words. Mixed-case words count in none of the three.
pub fn casing_fractions(text: &TokenizedText) -> (f64, f64, f64) {
    let (mut lower, mut upper, mut title, mut total) = (0.0, 0.0, 0.0, 0.0);
    for w in &text.words {
        if w.is_empty() || !w.chars().all(|c| c.is_alphabetic()) {
            continue;
        }
        total += 1.0;
        match casing_of(w) {
            Some(Casing::Lower) => lower += 1.0,
            Some(Casing::Upper) => upper += 1.0,
            Some(Casing::Title) => title += 1.0,
            None => {}
        }
    }
    if total == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        (lower / total, upper / total, title / total)
    }
}

pub(crate) enum Casing {
    Lower,
    Upper,
    Title,
}

pub(crate) fn casing_of(word: &str) -> Option<Casing> {
    let mut chars = word.chars();
    let first = chars.next()?;
    let rest_lower = chars.clone().all(|c| c.is_lowercase());
    if first.is_lowercase() && rest_lower {
        Some(Casing::Lower)
    } else if word.chars().all(|c| c.is_uppercase()) {
        Some(Casing::Upper)
    } else if first.is_uppercase() && rest_lower {
        Some(Casing::Title)
    } else {
        None
    }
}

fn levenshtein(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Normalized edit similarity: `1 - levenshtein(a, b) / max(|a|, |b|)`.
/// Two empty strings are identical (1.0).
pub fn string_similarity(a: &str, b: &str) -> f64 {
    let ca: Vec<char> = a.chars().collect();
    let cb: Vec<char> = b.chars().collect();
    let max = ca.len().max(cb.len());
    if max == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&ca, &cb) as f64 / max as f64
}

/// Count words containing three or more identical consecutive characters.
pub fn count_elongated<S: AsRef<str>>(words: &[S]) -> usize {
    words
        .iter()
        .filter(|w| {
            let mut run = 0usize;
            let mut last: Option<char> = None;
            for c in w.as_ref().chars() {
                if Some(c) == last {
                    run += 1;
                    if run >= 3 {
                        return true;
                    }
                } else {
                    run = 1;
                    last = Some(c);
                }
            }
            false
        })
        .count()
}

static EASY_WORDS: OnceLock<HashSet<&'static str>> = OnceLock::new();

fn easy_words() -> &'static HashSet<&'static str> {
    EASY_WORDS.get_or_init(|| {
        include_str!("data/easy_words.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// A word is difficult when it is not on the bundled easy-word list and has
/// at least two syllables.
pub fn is_difficult_word(word: &str, syllables: usize) -> bool {
    syllables >= 2 && !easy_words().contains(word.to_lowercase().as_str())
}

struct TextCounts {
    words: f64,
    sentences: f64,
    syllables: f64,
    letters: f64,
    alnum_chars: f64,
    polysyllables: f64,
    difficult: f64,
}

fn counts_of(text: &TokenizedText) -> TextCounts {
    let mut c = TextCounts {
        words: text.words.len() as f64,
        sentences: text.sentences.len() as f64,
        syllables: 0.0,
        letters: 0.0,
        alnum_chars: 0.0,
        polysyllables: 0.0,
        difficult: 0.0,
    };
    for (w, &s) in text.words.iter().zip(&text.syllable_counts) {
        c.syllables += s as f64;
        c.letters += w.chars().filter(|ch| ch.is_alphabetic()).count() as f64;
        c.alnum_chars += w.chars().filter(|ch| ch.is_alphanumeric()).count() as f64;
        if s >= 3 {
            c.polysyllables += 1.0;
        }
        if is_difficult_word(w, s) {
            c.difficult += 1.0;
        }
    }
    c
}

fn linsear_write(text: &TokenizedText) -> f64 {
    // First-100-word sample; short texts use everything.
    let sample_words = text.words.len().min(100);
    if sample_words == 0 {
        return 0.0;
    }
    let mut points = 0.0;
    for &s in text.syllable_counts.iter().take(sample_words) {
        points += if s >= 3 { 3.0 } else { 1.0 };
    }
    // Sentences covering the sample: walk sentences until their cumulative
    // word count reaches the sample size.
    let mut covered = 0usize;
    let mut sentences = 0usize;
    for s in &text.sentences {
        sentences += 1;
        covered += tokenize_word_count(s);
        if covered >= sample_words {
            break;
        }
    }
    let sentences = sentences.max(1) as f64;
    let number = points / sentences;
    if number > 20.0 {
        number / 2.0
    } else {
        (number - 2.0) / 2.0
    }
}

fn tokenize_word_count(s: &str) -> usize {
    let mut n = 0;
    let mut in_word = false;
    for c in s.chars() {
        if is_word_char(c) {
            if !in_word {
                n += 1;
            }
            in_word = true;
        } else {
            in_word = false;
        }
    }
    n
}

/// Compute the nine readability indices from their published closed forms.
/// Texts with zero words or zero sentences return 0 everywhere with the
/// degeneracy flag set.
pub fn readability(text: &TokenizedText) -> Readability {
    let c = counts_of(text);
    if c.words == 0.0 || c.sentences == 0.0 {
        return Readability {
            degenerate: true,
            ..Readability::default()
        };
    }
    let wps = c.words / c.sentences;
    let spw = c.syllables / c.words;

    let flesch_reading_ease = 206.835 - 1.015 * wps - 84.6 * spw;
    let flesch_kincaid_grade = 0.39 * wps + 11.8 * spw - 15.59;
    let smog_index = 1.0430 * (c.polysyllables * 30.0 / c.sentences).sqrt() + 3.1291;
    let l = 100.0 * c.letters / c.words;
    let s = 100.0 * c.sentences / c.words;
    let coleman_liau_index = 0.0588 * l - 0.296 * s - 15.8;
    let automated_readability_index = 4.71 * (c.alnum_chars / c.words) + 0.5 * wps - 21.43;
    let pct_difficult = 100.0 * c.difficult / c.words;
    let mut dale_chall = 0.1579 * pct_difficult + 0.0496 * wps;
    if pct_difficult > 5.0 {
        dale_chall += 3.6365;
    }
    let gunning_fog = 0.4 * (wps + 100.0 * c.polysyllables / c.words);

    Readability {
        flesch_reading_ease,
        flesch_kincaid_grade,
        smog_index,
        coleman_liau_index,
        automated_readability_index,
        dale_chall_readability_score: dale_chall,
        difficult_words: c.difficult,
        linsear_write_formula: linsear_write(text),
        gunning_fog,
        degenerate: false,
    }
}
