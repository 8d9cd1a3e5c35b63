//! Pluggable language identification with a bundled character-n-gram
//! profile detector (rank-order distance over 1..3-grams).
//!
//! The default profiles cover a fixed set of European languages and keep the
//! build hermetic; an external model can be plugged in by implementing
//! [`LanguageDetector`] or by loading profile files from a directory.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Detector interface; implementations must be safe for concurrent calls.
pub trait LanguageDetector: Send + Sync {
    /// ISO-ish language code, or `None` when the text is too short to judge.
    fn detect(&self, text: &str) -> Option<String>;
}

const PROFILE_SIZE: usize = 400;
const TEXT_PROFILE_SIZE: usize = 300;

struct Profile {
    code: String,
    ranks: HashMap<String, usize>,
}

/// Bundled rank-order n-gram detector.
pub struct NgramProfileDetector {
    profiles: Vec<Profile>,
}

const BUNDLED: [(&str, &str); 7] = [
    ("de", include_str!("data/lang/de.profile")),
    ("en", include_str!("data/lang/en.profile")),
    ("es", include_str!("data/lang/es.profile")),
    ("fr", include_str!("data/lang/fr.profile")),
    ("it", include_str!("data/lang/it.profile")),
    ("nl", include_str!("data/lang/nl.profile")),
    ("pt", include_str!("data/lang/pt.profile")),
];

impl NgramProfileDetector {
    /// Detector over the bundled default profiles.
    pub fn bundled() -> Self {
        let profiles = BUNDLED
            .iter()
            .map(|(code, data)| parse_profile(code, data))
            .collect();
        NgramProfileDetector { profiles }
    }

    /// Load `<code>.profile` files from a directory. The file format is one
    /// n-gram per line, most frequent first, with '_' encoding a space.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let entries = fs::read_dir(dir)
            .map_err(|e| Error::DetectorUnavailable(format!("{}: {e}", dir.display())))?;
        let mut profiles = Vec::new();
        for entry in entries {
            let entry =
                entry.map_err(|e| Error::DetectorUnavailable(format!("{}: {e}", dir.display())))?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("profile") {
                continue;
            }
            let code = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            let data = fs::read_to_string(&path)
                .map_err(|e| Error::DetectorUnavailable(format!("{}: {e}", path.display())))?;
            profiles.push(parse_profile(&code, &data));
        }
        if profiles.is_empty() {
            return Err(Error::DetectorUnavailable(format!(
                "no .profile files in {}",
                dir.display()
            )));
        }
        profiles.sort_by(|a, b| a.code.cmp(&b.code));
        Ok(NgramProfileDetector { profiles })
    }
}

fn parse_profile(code: &str, data: &str) -> Profile {
    let ranks = data
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(rank, gram)| (gram.replace('_', " "), rank))
        .collect();
    Profile {
        code: code.to_string(),
        ranks,
    }
}

fn normalize(text: &str) -> String {
    let mapped: String = text
        .chars()
        .map(|c| {
            if c.is_alphabetic() {
                c.to_lowercase().next().unwrap_or(c)
            } else {
                ' '
            }
        })
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn text_profile(text: &str) -> Vec<String> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for word in text.split(' ') {
        let padded: Vec<char> = format!(" {word} ").chars().collect();
        for n in 1..=3usize {
            for win in padded.windows(n) {
                let gram: String = win.iter().collect();
                if gram == " " {
                    continue;
                }
                *counts.entry(gram).or_insert(0) += 1;
            }
        }
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(TEXT_PROFILE_SIZE);
    ranked.into_iter().map(|(g, _)| g).collect()
}

impl LanguageDetector for NgramProfileDetector {
    fn detect(&self, text: &str) -> Option<String> {
        let normalized = normalize(text);
        if normalized.chars().filter(|c| *c != ' ').count() < 3 {
            return None;
        }
        let grams = text_profile(&normalized);
        let mut best: Option<(&str, usize)> = None;
        for p in &self.profiles {
            let mut dist = 0usize;
            for (rank, gram) in grams.iter().enumerate() {
                dist += match p.ranks.get(gram) {
                    Some(&r) => rank.abs_diff(r),
                    None => PROFILE_SIZE,
                };
            }
            // Ties go to the lexicographically smaller code; profiles are
            // iterated in sorted order so strict less-than suffices.
            if best.map_or(true, |(_, d)| dist < d) {
                best = Some((&p.code, dist));
            }
        }
        best.map(|(code, _)| code.to_string())
    }
}
