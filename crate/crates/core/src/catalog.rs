//! The feature catalog: every extractable feature, its source, its family
//! and the datasets it can be computed on.
//!
//! Catalog order is the feature-matrix column order; it never changes between
//! runs. Features are gated per dataset by which raw fields that dataset
//! carries (e.g. TwiBot-20 ships tweet text only, so source- and
//! timestamp-based content features are not in its catalog).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dataset ids the availability matrix knows about.
pub const DATASET_IDS: [&str; 4] = ["cresci-15", "cresci-17", "twibot-20", "synthetic"];

/// Where a feature is computed from: profile metadata or posted content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSource {
    Account,
    Content,
}

/// Feature family, mirroring the grouping used for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureFamily {
    Social,
    Temporal,
    Readability,
    Stylometry,
    Platform,
    Raw,
}

/// One named feature with its per-dataset availability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDef {
    pub name: String,
    pub source: FeatureSource,
    pub family: FeatureFamily,
    pub availability: Vec<String>,
}

impl FeatureDef {
    pub fn available_on(&self, dataset_id: &str) -> bool {
        self.availability.iter().any(|d| d == dataset_id)
    }
}

/// Ordered list of feature definitions with name lookup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<FeatureDef>", into = "Vec<FeatureDef>")]
pub struct FeatureCatalog {
    defs: Vec<FeatureDef>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl FeatureCatalog {
    fn new(defs: Vec<FeatureDef>) -> Self {
        let index = defs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name.clone(), i))
            .collect();
        FeatureCatalog { defs, index }
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FeatureDef> {
        self.defs.iter()
    }

    pub fn names(&self) -> Vec<String> {
        self.defs.iter().map(|d| d.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&FeatureDef> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn def(&self, idx: usize) -> &FeatureDef {
        &self.defs[idx]
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Restrict to features from one source, keeping order.
    pub fn filter_source(&self, source: FeatureSource) -> FeatureCatalog {
        FeatureCatalog::new(
            self.defs
                .iter()
                .filter(|d| d.source == source)
                .cloned()
                .collect(),
        )
    }
}

impl From<Vec<FeatureDef>> for FeatureCatalog {
    fn from(defs: Vec<FeatureDef>) -> Self {
        FeatureCatalog::new(defs)
    }
}

impl From<FeatureCatalog> for Vec<FeatureDef> {
    fn from(c: FeatureCatalog) -> Self {
        c.defs
    }
}

/// Availability shorthand used while declaring the table.
#[derive(Clone, Copy)]
enum Avail {
    /// Computable on every dataset.
    All,
    /// Needs per-tweet timestamps (absent in TwiBot-20).
    NeedsTweetTimes,
    /// Needs the tweet `source` field (absent in TwiBot-20).
    NeedsSource,
    /// Needs per-tweet favorite and retweet counts (Cresci-17 only among the
    /// benchmark datasets; the synthetic generator emits them too).
    NeedsTweetCounts,
}

impl Avail {
    fn datasets(self) -> Vec<String> {
        let list: &[&str] = match self {
            Avail::All => &DATASET_IDS,
            Avail::NeedsTweetTimes | Avail::NeedsSource => {
                &["cresci-15", "cresci-17", "synthetic"]
            }
            Avail::NeedsTweetCounts => &["cresci-17", "synthetic"],
        };
        list.iter().map(|s| s.to_string()).collect()
    }
}

fn def(name: &str, source: FeatureSource, family: FeatureFamily, avail: Avail) -> FeatureDef {
    FeatureDef {
        name: name.to_string(),
        source,
        family,
        availability: avail.datasets(),
    }
}

/// The five profile color fields subject to default/common/uncommon binning.
pub const COLOR_FIELDS: [&str; 5] = [
    "profile_background_color",
    "profile_link_color",
    "profile_sidebar_border_color",
    "profile_sidebar_fill_color",
    "profile_text_color",
];

fn full_catalog() -> Vec<FeatureDef> {
    use FeatureFamily::*;
    use FeatureSource::{Account, Content};

    let mut d = Vec::with_capacity(128);

    // Account / social
    d.push(def("followers_growth_rate", Account, Social, Avail::All));
    d.push(def("friends_growth_rate", Account, Social, Avail::All));
    d.push(def("favourites_growth_rate", Account, Social, Avail::All));
    d.push(def("listed_growth_rate", Account, Social, Avail::All));
    d.push(def("followers_friends_ratio", Account, Social, Avail::All));
    d.push(def("average_favorites", Account, Social, Avail::All));
    d.push(def(
        "average_retweets",
        Account,
        Social,
        Avail::NeedsTweetCounts,
    ));
    d.push(def("reputation", Account, Social, Avail::All));

    // Account / temporal
    d.push(def("user_age", Account, Temporal, Avail::All));
    d.push(def("tweet_freq", Account, Temporal, Avail::All));

    // Account / readability (description)
    for name in [
        "description_flesch_reading_ease",
        "description_flesch_kincaid_grade",
        "description_smog_index",
        "description_coleman_liau_index",
        "description_automated_readability_index",
        "description_dale_chall_readability_score",
        "description_difficult_words",
        "description_linsear_write_formula",
        "description_gunning_fog",
    ] {
        d.push(def(name, Account, Readability, Avail::All));
    }

    // Account / stylometry
    for name in [
        "screen_name_length",
        "name_length",
        "description_length",
        "description_digits_count",
        "description_mean_bigram_freq",
        "screen_name_digits_count",
        "name_digits_count",
        "screen_name_mean_bigram_freq",
        "screen_name_entropy",
        "name_mean_bigram_freq",
        "name_entropy",
        "description_entropy",
        "name_sim",
        "name_ratio",
        "name_contains_bot",
        "screen_name_contains_bot",
        "description_contains_bot",
        "description_hashtag_count",
        "description_url_count",
        "description_unique_url_count",
        "description_unique_mention_count",
        "description_fraction_of_words_lowercase",
        "description_fraction_of_words_uppercase",
        "description_fraction_of_words_tilecase",
        "description_word_count",
        "description_sentence_count",
        "description_average_word_length",
        "description_average_words_per_sentence",
    ] {
        d.push(def(name, Account, Stylometry, Avail::All));
    }

    // Account / platform (color binning and background flags)
    for name in [
        "profile_background_color_is_default",
        "profile_background_color_is_uncommon",
        "profile_background_color_is_common",
        "profile_background_image_url_default_other_none",
        "has_profile_background_tile",
        "profile_link_color_default",
        "profile_link_color_common",
        "profile_link_color_uncommon",
        "profile_sidebar_border_color_default",
        "profile_sidebar_border_color_common",
        "profile_sidebar_border_color_uncommon",
        "profile_sidebar_fill_color_default",
        "profile_sidebar_fill_color_common",
        "profile_sidebar_fill_color_uncommon",
        "profile_text_color_default",
        "profile_text_color_common",
        "profile_text_color_uncommon",
    ] {
        d.push(def(name, Account, Platform, Avail::All));
    }

    // Account / retained raw fields
    for name in [
        "followers_count",
        "friends_count",
        "favourites_count",
        "listed_count",
        "statuses_count",
        "verified",
        "protected",
        "geo_enabled",
        "default_profile",
        "default_profile_image",
        "profile_use_background_image",
    ] {
        d.push(def(name, Account, Raw, Avail::All));
    }

    // Content / social
    d.push(def("ratio_retweet", Content, Social, Avail::All));

    // Content / temporal
    d.push(def(
        "average_time_between_tweets",
        Content,
        Temporal,
        Avail::NeedsTweetTimes,
    ));
    d.push(def("idle_hours", Content, Temporal, Avail::NeedsTweetTimes));
    for name in [
        "size_dna_type",
        "compress_size_dna_type",
        "compression_ratio_type",
        "size_dna_content",
        "compress_size_dna_content",
        "compression_ratio_content",
    ] {
        d.push(def(name, Content, Temporal, Avail::All));
    }

    // Content / readability (tweets)
    for name in [
        "flesch_reading_ease",
        "flesch_kincaid_grade",
        "smog_index",
        "coleman_liau_index",
        "automated_readability_index",
        "dale_chall_readability_score",
        "difficult_words",
        "linsear_write_formula",
        "gunning_fog",
    ] {
        d.push(def(name, Content, Readability, Avail::All));
    }

    // Content / platform (tweet sources)
    for name in [
        "different_sources",
        "source_tweetadder_percentage",
        "source_iphone_percentage",
        "source_android_percentage",
        "source_twitter_percentage",
        "source_tweetdeck_percentage",
        "source_ipad_percentage",
        "source_web_percentage",
        "source_facebook_percentage",
        "source_instagram_percentage",
        "source_api_percentage",
        "source_web_api_percentage",
        "source_mobile_percentage",
        "source_other_percentage",
    ] {
        d.push(def(name, Content, Platform, Avail::NeedsSource));
    }

    // Content / stylometry
    for name in [
        "bot_reference_mean",
        "average_tweet_length",
        "num_unique_urls_mean",
        "num_unique_mentions_mean",
        "max_urls_in_a_tweet",
        "max_hashtags_in_a_tweet",
        "max_mentions_in_a_tweet",
        "average_tweets_only_url",
        "average_elongated_words",
        "num_unique_langs",
        "word_count_mean",
        "sentence_count_mean",
        "average_word_length",
        "average_words_lowercase",
        "average_words_uppercase",
        "average_words_titlecase",
        "tweets_sim_length",
        "tweets_sim_punctuation",
    ] {
        d.push(def(name, Content, Stylometry, Avail::All));
    }

    // Content / social (interaction aggregates)
    d.push(def("credibility", Content, Social, Avail::NeedsTweetCounts));
    d.push(def("engagement", Content, Social, Avail::NeedsTweetCounts));

    d
}

/// Build the feature catalog for one dataset (or `"all"` for the union),
/// filtered to the features computable there.
pub fn build_catalog(dataset_id: &str) -> Result<FeatureCatalog> {
    let all = full_catalog();
    if dataset_id == "all" {
        return Ok(FeatureCatalog::new(all));
    }
    if !DATASET_IDS.contains(&dataset_id) {
        return Err(Error::UnknownDataset(dataset_id.to_string()));
    }
    Ok(FeatureCatalog::new(
        all.into_iter()
            .filter(|d| d.available_on(dataset_id))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cresci_17_has_full_feature_set() {
        let c = build_catalog("cresci-17").unwrap();
        assert!(c.contains("reputation"));
        assert!(c.contains("credibility"));
        assert!(c.contains("compression_ratio_type"));
    }

    #[test]
    fn twibot_20_drops_source_and_timestamp_features() {
        let c = build_catalog("twibot-20").unwrap();
        assert!(!c.contains("source_iphone_percentage"));
        assert!(!c.contains("average_time_between_tweets"));
        assert!(!c.contains("idle_hours"));
        assert!(!c.contains("credibility"));
        assert!(c.contains("compression_ratio_content"));
        assert!(c.contains("flesch_reading_ease"));
        assert!(c.contains("ratio_retweet"));
    }

    #[test]
    fn cresci_15_lacks_interaction_aggregates() {
        let c = build_catalog("cresci-15").unwrap();
        assert!(!c.contains("credibility"));
        assert!(!c.contains("engagement"));
        assert!(!c.contains("average_retweets"));
        assert!(c.contains("source_iphone_percentage"));
    }

    #[test]
    fn unknown_dataset_is_an_error() {
        assert!(matches!(
            build_catalog("unknown-xyz"),
            Err(Error::UnknownDataset(_))
        ));
    }

    #[test]
    fn catalog_is_deterministic_and_names_unique() {
        let a = build_catalog("all").unwrap();
        let b = build_catalog("all").unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let names = a.names();
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), names.len(), "duplicate feature names");
    }

    #[test]
    fn subset_catalogs_preserve_full_order() {
        let all = build_catalog("all").unwrap();
        for id in DATASET_IDS {
            let sub = build_catalog(id).unwrap();
            let mut last = 0;
            for d in sub.iter() {
                let pos = all.position(&d.name).expect("name resolves");
                assert!(pos >= last);
                last = pos;
            }
        }
    }

    #[test]
    fn synthetic_matches_union() {
        let all = build_catalog("all").unwrap();
        let syn = build_catalog("synthetic").unwrap();
        assert_eq!(all.len(), syn.len());
    }
}
