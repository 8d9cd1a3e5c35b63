//! Content-based features: interaction aggregates (credibility, engagement),
//! tweet timing, digital-DNA compressibility, source classification, tweet
//! stylometry and tweet readability.

use std::collections::BTreeSet;
use std::io::Write;

use chrono::{DateTime, Utc};
use flate2::write::DeflateEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::textstats::{
    casing_of, count_elongated, extract_entities, readability, tokenize, Casing, EntitySet,
    LanguageDetector, Readability,
};
use crate::types::TweetRecord;

/// Per-account tweet aggregates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AccountAggregates {
    pub n_tweets: usize,
    pub n_retweets: usize,
    pub n_replies: usize,
    pub sum_favorites: i64,
    pub sum_retweet_counts: i64,
    pub timestamps: Vec<DateTime<Utc>>,
}

impl AccountAggregates {
    pub fn from_tweets(tweets: &[TweetRecord]) -> AccountAggregates {
        let mut agg = AccountAggregates {
            n_tweets: tweets.len(),
            ..AccountAggregates::default()
        };
        for t in tweets {
            if t.is_retweet {
                agg.n_retweets += 1;
            } else if t.is_reply {
                agg.n_replies += 1;
            }
            agg.sum_favorites += t.favorite_count.unwrap_or(0).max(0);
            agg.sum_retweet_counts += t.retweet_count.unwrap_or(0).max(0);
            if let Some(ts) = t.created_at {
                agg.timestamps.push(ts);
            }
        }
        agg.timestamps.sort_unstable();
        agg
    }
}

/// Mean of the per-follower favourite and retweet sums.
pub fn credibility(agg: &AccountAggregates, followers: i64) -> f64 {
    let followers = (followers.max(0) as f64).max(1.0);
    (agg.sum_favorites as f64 / followers + agg.sum_retweet_counts as f64 / followers) / 2.0
}

/// Mean of followers, list memberships and the interaction sums.
pub fn engagement(followers: i64, lists: i64, agg: &AccountAggregates) -> f64 {
    (followers.max(0) as f64
        + lists.max(0) as f64
        + agg.sum_retweet_counts as f64
        + agg.sum_favorites as f64)
        / 4.0
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TemporalFeatures {
    /// Mean gap between consecutive tweets, hours; needs two timestamps.
    pub average_time_between_tweets: Option<f64>,
    /// Longest gap, hours.
    pub idle_hours: Option<f64>,
    pub ratio_retweet: f64,
}

pub fn temporal_features(agg: &AccountAggregates) -> TemporalFeatures {
    let mut t = TemporalFeatures {
        ratio_retweet: agg.n_retweets as f64 / (agg.n_tweets as f64).max(1.0),
        ..TemporalFeatures::default()
    };
    if agg.timestamps.len() >= 2 {
        let gaps: Vec<f64> = agg
            .timestamps
            .windows(2)
            .map(|w| (w[1] - w[0]).num_seconds() as f64 / 3600.0)
            .collect();
        t.average_time_between_tweets = Some(gaps.iter().sum::<f64>() / gaps.len() as f64);
        t.idle_hours = gaps.iter().cloned().reduce(f64::max);
    }
    t
}

/// Behavioral fingerprint alphabet kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DnaKind {
    /// A = plain tweet, C = reply, T = retweet.
    Type,
    /// N = plain, U = url, H = hashtag, M = mention, X = mixed.
    Content,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnaSequence {
    pub kind: DnaKind,
    pub symbols: String,
}

fn type_symbol(t: &TweetRecord) -> char {
    if t.is_retweet {
        'T'
    } else if t.is_reply {
        'C'
    } else {
        'A'
    }
}

fn content_symbol(e: &EntitySet) -> char {
    let kinds = usize::from(!e.urls.is_empty())
        + usize::from(!e.hashtags.is_empty())
        + usize::from(!e.mentions.is_empty());
    if kinds >= 2 {
        'X'
    } else if !e.urls.is_empty() {
        'U'
    } else if !e.hashtags.is_empty() {
        'H'
    } else if !e.mentions.is_empty() {
        'M'
    } else {
        'N'
    }
}

/// One symbol per tweet, in the order given (callers pass tweets
/// chronologically when timestamps exist, file order otherwise).
pub fn build_type_dna(tweets: &[TweetRecord]) -> DnaSequence {
    DnaSequence {
        kind: DnaKind::Type,
        symbols: tweets.iter().map(type_symbol).collect(),
    }
}

pub fn build_content_dna(entities: &[EntitySet]) -> DnaSequence {
    DnaSequence {
        kind: DnaKind::Content,
        symbols: entities.iter().map(content_symbol).collect(),
    }
}

/// Byte length after DEFLATE at a fixed level; the codec is pinned so the
/// feature is identical across platforms and runs.
pub fn compressed_len(symbols: &str) -> usize {
    let mut enc = DeflateEncoder::new(Vec::new(), Compression::new(6));
    enc.write_all(symbols.as_bytes()).expect("in-memory write");
    enc.finish().expect("in-memory finish").len()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DnaFeatures {
    pub size_dna_type: f64,
    pub compress_size_dna_type: f64,
    pub compression_ratio_type: f64,
    pub size_dna_content: f64,
    pub compress_size_dna_content: f64,
    pub compression_ratio_content: f64,
}

/// The six DNA features. Ratio direction is original / compressed.
pub fn dna_features(tweets: &[TweetRecord], entities: &[EntitySet]) -> DnaFeatures {
    debug_assert_eq!(tweets.len(), entities.len());
    let type_dna = build_type_dna(tweets);
    let content_dna = build_content_dna(entities);
    let size_type = type_dna.symbols.len() as f64;
    let size_content = content_dna.symbols.len() as f64;
    let comp_type = compressed_len(&type_dna.symbols) as f64;
    let comp_content = compressed_len(&content_dna.symbols) as f64;
    DnaFeatures {
        size_dna_type: size_type,
        compress_size_dna_type: comp_type,
        compression_ratio_type: if comp_type > 0.0 { size_type / comp_type } else { 0.0 },
        size_dna_content: size_content,
        compress_size_dna_content: comp_content,
        compression_ratio_content: if comp_content > 0.0 {
            size_content / comp_content
        } else {
            0.0
        },
    }
}

/// Source categories checked by case-insensitive substring, first match
/// wins, in this order; unmatched sources fall into the trailing `other`.
pub const SOURCE_CATEGORIES: [&str; 12] = [
    "tweetadder",
    "iphone",
    "android",
    "twitter",
    "tweetdeck",
    "ipad",
    "web",
    "facebook",
    "instagram",
    "api",
    "web-api",
    "mobile",
];

pub fn classify_source(raw: &str) -> usize {
    let lower = raw.to_lowercase();
    for (i, cat) in SOURCE_CATEGORIES.iter().enumerate() {
        if lower.contains(cat) {
            return i;
        }
    }
    SOURCE_CATEGORIES.len() // other
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceFeatures {
    /// Fractions over the 13 categories (12 named + other), summing to 1
    /// whenever the account has at least one sourced tweet.
    pub fractions: [f64; 13],
    pub different_sources: f64,
    /// False when no tweet carries a source (everything masked).
    pub present: bool,
}

pub fn source_features(tweets: &[TweetRecord], vocab_size: usize) -> SourceFeatures {
    let sourced: Vec<&str> = tweets
        .iter()
        .filter_map(|t| t.source.as_deref())
        .filter(|s| !s.is_empty())
        .collect();
    if sourced.is_empty() {
        return SourceFeatures::default();
    }
    let mut fractions = [0.0f64; 13];
    for s in &sourced {
        fractions[classify_source(s)] += 1.0;
    }
    let n = sourced.len() as f64;
    for f in &mut fractions {
        *f /= n;
    }
    let distinct: BTreeSet<&str> = sourced.into_iter().collect();
    SourceFeatures {
        fractions,
        different_sources: if vocab_size > 0 {
            distinct.len() as f64 / vocab_size as f64
        } else {
            0.0
        },
        present: true,
    }
}

/// Precomputed per-tweet view shared by the stylometry and readability
/// extractors, so each tweet is tokenized once.
#[derive(Debug, Clone)]
pub struct TweetView {
    pub raw_chars: f64,
    pub entities: EntitySet,
    pub stripped: String,
    pub word_count: f64,
    pub sentence_count: f64,
    pub word_chars: f64,
    pub lower_words: f64,
    pub upper_words: f64,
    pub title_words: f64,
    pub elongated: f64,
    pub punctuation: f64,
    pub bot_refs: f64,
    pub readability: Readability,
    pub lang: Option<String>,
}

impl TweetView {
    pub fn build(text: &str, detector: &dyn LanguageDetector) -> TweetView {
        let extraction = extract_entities(text);
        let tokens = tokenize(&extraction.stripped);
        let (mut lower, mut upper, mut title) = (0.0, 0.0, 0.0);
        let mut word_chars = 0.0;
        for w in &tokens.words {
            word_chars += w.chars().count() as f64;
            if w.chars().all(|c| c.is_alphabetic()) {
                match casing_of(w) {
                    Some(Casing::Lower) => lower += 1.0,
                    Some(Casing::Upper) => upper += 1.0,
                    Some(Casing::Title) => title += 1.0,
                    None => {}
                }
            }
        }
        let punctuation = extraction
            .stripped
            .chars()
            .filter(|c| c.is_ascii_punctuation())
            .count() as f64;
        TweetView {
            raw_chars: text.chars().count() as f64,
            word_count: tokens.words.len() as f64,
            sentence_count: tokens.sentences.len() as f64,
            word_chars,
            lower_words: lower,
            upper_words: upper,
            title_words: title,
            elongated: count_elongated(&tokens.words) as f64,
            punctuation,
            bot_refs: text.to_lowercase().matches("bot").count() as f64,
            readability: readability(&tokens),
            lang: detector.detect(&extraction.stripped),
            entities: extraction.entities,
            stripped: extraction.stripped,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StylometryFeatures {
    pub bot_reference_mean: f64,
    pub average_tweet_length: f64,
    pub num_unique_urls_mean: f64,
    pub num_unique_mentions_mean: f64,
    pub max_urls_in_a_tweet: f64,
    pub max_hashtags_in_a_tweet: f64,
    pub max_mentions_in_a_tweet: f64,
    pub average_tweets_only_url: f64,
    pub average_elongated_words: f64,
    pub num_unique_langs: f64,
    pub word_count_mean: f64,
    pub sentence_count_mean: f64,
    pub average_word_length: f64,
    pub average_words_lowercase: f64,
    pub average_words_uppercase: f64,
    pub average_words_titlecase: f64,
    pub tweets_sim_length: f64,
    pub tweets_sim_punctuation: f64,
}

/// Similarity of a per-tweet quantity: 1 / (1 + cv). A zero mean counts as
/// perfectly uniform.
fn uniformity(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n;
    if mean == 0.0 {
        return 1.0;
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    1.0 / (1.0 + var.sqrt() / mean)
}

pub fn tweet_stylometry(views: &[TweetView]) -> StylometryFeatures {
    if views.is_empty() {
        return StylometryFeatures::default();
    }
    let n = views.len() as f64;
    let mean = |f: fn(&TweetView) -> f64| views.iter().map(f).sum::<f64>() / n;
    let max = |f: fn(&TweetView) -> f64| views.iter().map(f).fold(0.0, f64::max);

    let mut langs: BTreeSet<&str> = BTreeSet::new();
    for v in views {
        if let Some(code) = v.lang.as_deref() {
            langs.insert(code);
        }
    }
    let total_words: f64 = views.iter().map(|v| v.word_count).sum();
    let total_word_chars: f64 = views.iter().map(|v| v.word_chars).sum();

    StylometryFeatures {
        bot_reference_mean: mean(|v| v.bot_refs),
        average_tweet_length: mean(|v| v.raw_chars),
        num_unique_urls_mean: mean(|v| v.entities.unique_urls() as f64),
        num_unique_mentions_mean: mean(|v| v.entities.unique_mentions() as f64),
        max_urls_in_a_tweet: max(|v| v.entities.urls.len() as f64),
        max_hashtags_in_a_tweet: max(|v| v.entities.hashtags.len() as f64),
        max_mentions_in_a_tweet: max(|v| v.entities.mentions.len() as f64),
        average_tweets_only_url: views
            .iter()
            .filter(|v| !v.entities.urls.is_empty() && v.stripped.is_empty())
            .count() as f64
            / n,
        average_elongated_words: mean(|v| v.elongated),
        num_unique_langs: langs.len() as f64,
        word_count_mean: mean(|v| v.word_count),
        sentence_count_mean: mean(|v| v.sentence_count),
        average_word_length: if total_words > 0.0 {
            total_word_chars / total_words
        } else {
            0.0
        },
        average_words_lowercase: mean(|v| v.lower_words),
        average_words_uppercase: mean(|v| v.upper_words),
        average_words_titlecase: mean(|v| v.title_words),
        tweets_sim_length: uniformity(views.iter().map(|v| v.raw_chars)),
        tweets_sim_punctuation: uniformity(views.iter().map(|v| v.punctuation)),
    }
}

/// Per-index mean of tweet readability over non-degenerate tweets; `false`
/// (masked) when every tweet is degenerate.
pub fn tweet_readability(views: &[TweetView]) -> (Readability, bool) {
    let live: Vec<&Readability> = views
        .iter()
        .map(|v| &v.readability)
        .filter(|r| !r.degenerate)
        .collect();
    if live.is_empty() {
        return (Readability { degenerate: true, ..Readability::default() }, false);
    }
    let n = live.len() as f64;
    let mut sums = [0.0f64; 9];
    for r in &live {
        for (s, v) in sums.iter_mut().zip(r.as_array()) {
            *s += v;
        }
    }
    (
        Readability {
            flesch_reading_ease: sums[0] / n,
            flesch_kincaid_grade: sums[1] / n,
            smog_index: sums[2] / n,
            coleman_liau_index: sums[3] / n,
            automated_readability_index: sums[4] / n,
            dale_chall_readability_score: sums[5] / n,
            difficult_words: sums[6] / n,
            linsear_write_formula: sums[7] / n,
            gunning_fog: sums[8] / n,
            degenerate: false,
        },
        true,
    )
}
