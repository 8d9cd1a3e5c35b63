//! URL, hashtag, mention and emoji extraction, plus the stripped text used
//! by every downstream text statistic.

use std::sync::OnceLock;

/// Entities found in a text, in order of appearance, duplicates retained.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntitySet {
    pub urls: Vec<String>,
    pub hashtags: Vec<String>,
    pub mentions: Vec<String>,
    pub emojis: Vec<String>,
}

impl EntitySet {
    pub fn unique_urls(&self) -> usize {
        unique_count(&self.urls)
    }

    pub fn unique_mentions(&self) -> usize {
        unique_count(&self.mentions)
    }

    pub fn is_empty(&self) -> bool {
        self.urls.is_empty()
            && self.hashtags.is_empty()
            && self.mentions.is_empty()
            && self.emojis.is_empty()
    }
}

fn unique_count(items: &[String]) -> usize {
    let mut v: Vec<&String> = items.iter().collect();
    v.sort();
    v.dedup();
    v.len()
}

/// Extraction result: the entities and the text with all of them removed
/// and whitespace collapsed.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub entities: EntitySet,
    pub stripped: String,
}

static EMOJI_RANGES: OnceLock<Vec<(u32, u32)>> = OnceLock::new();

fn emoji_ranges() -> &'static [(u32, u32)] {
    EMOJI_RANGES.get_or_init(|| {
        include_str!("data/emoji_ranges.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| {
                let (a, b) = l.split_once('-')?;
                Some((
                    u32::from_str_radix(a, 16).ok()?,
                    u32::from_str_radix(b, 16).ok()?,
                ))
            })
            .collect()
    })
}

fn is_emoji(c: char) -> bool {
    let cp = c as u32;
    emoji_ranges().iter().any(|&(a, b)| cp >= a && cp <= b)
}

// Joiners and variation selectors that glue emoji sequences together; they
// are stripped but not counted as emojis themselves.
fn is_emoji_modifier(c: char) -> bool {
    matches!(c as u32, 0x200D | 0xFE0E | 0xFE0F)
}

fn is_url_token(token: &str) -> bool {
    let lower = token.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

fn is_tag_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Extract URLs, hashtags, mentions and emojis, and return the text with all
/// four removed and whitespace collapsed. Entity counts must be taken before
/// stripping; every other text statistic is computed on the stripped text.
///
/// Removal can expose new patterns (an emoji between '#' and a word, say),
/// so extraction repeats until the text is entity-free.
pub fn extract_entities(text: &str) -> Extraction {
    let mut set = EntitySet::default();
    let mut current = text.to_string();
    loop {
        let Extraction { entities, stripped } = extract_once(&current);
        let done = entities.is_empty();
        set.urls.extend(entities.urls);
        set.hashtags.extend(entities.hashtags);
        set.mentions.extend(entities.mentions);
        set.emojis.extend(entities.emojis);
        current = stripped;
        if done {
            return Extraction {
                entities: set,
                stripped: current,
            };
        }
    }
}

fn extract_once(text: &str) -> Extraction {
    let mut set = EntitySet::default();
    let mut kept = String::with_capacity(text.len());

    for token in text.split_whitespace() {
        if is_url_token(token) {
            set.urls
                .push(token.trim_end_matches(['.', ',', ';', ':', '!', '?', ')', '"', '\'']).to_string());
            continue;
        }
        let chars: Vec<char> = token.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if (c == '#' || c == '@') && i + 1 < chars.len() && is_tag_char(chars[i + 1]) {
                let start = i + 1;
                let mut end = start;
                while end < chars.len() && is_tag_char(chars[end]) {
                    end += 1;
                }
                let word: String = chars[start..end].iter().collect();
                if c == '#' {
                    set.hashtags.push(word);
                } else {
                    set.mentions.push(word);
                }
                i = end;
            } else if is_emoji(c) {
                set.emojis.push(c.to_string());
                i += 1;
            } else if is_emoji_modifier(c) {
                i += 1;
            } else {
                kept.push(c);
                i += 1;
            }
        }
        kept.push(' ');
    }

    let stripped = kept.split_whitespace().collect::<Vec<_>>().join(" ");
    Extraction {
        entities: set,
        stripped,
    }
}
