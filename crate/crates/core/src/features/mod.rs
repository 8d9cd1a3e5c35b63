//! Feature extraction: turns canonical records into the dense feature
//! matrix, its availability mask, and the auxiliary color data needed to
//! refit the binning model inside cross-validation folds.

pub mod account;
pub mod content;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{FeatureCatalog, COLOR_FIELDS};
use crate::error::Result;
use crate::learn::{FitAudit, FoldFit};
use crate::matrix::Matrix;
use crate::textstats::LanguageDetector;
use crate::types::{AccountRecord, Label, TweetRecord};

use account::{
    account_ratios, background_image_level, description_readability, fit_color_model,
    name_features, user_age_days, Bin, ColorBinningModel, ProfileColors,
};
use content::{
    credibility, dna_features, engagement, source_features, temporal_features, tweet_readability,
    tweet_stylometry, AccountAggregates, TweetView,
};

/// One extracted row: values aligned to the catalog order, with a mask bit
/// per value (cleared when the feature's precondition failed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub account_id: String,
    pub label: Label,
    pub values: Vec<f64>,
    pub availability_mask: Vec<bool>,
}

impl FeatureVector {
    /// (feature name, value) pairs in catalog order.
    pub fn named_values<'a>(
        &'a self,
        catalog: &'a FeatureCatalog,
    ) -> impl Iterator<Item = (&'a str, f64)> + 'a {
        catalog
            .iter()
            .zip(&self.values)
            .map(|(def, &v)| (def.name.as_str(), v))
    }
}

/// Extracted dataset: matrix + mask + everything needed downstream.
#[derive(Debug, Clone)]
pub struct FeatureTable {
    pub dataset_id: String,
    pub catalog: FeatureCatalog,
    pub account_ids: Vec<String>,
    pub labels: Vec<Label>,
    pub matrix: Matrix,
    /// 1.0 where the value is real, 0.0 where it was imputed.
    pub mask: Matrix,
    /// Raw per-account color fields, kept so cross-validation can refit the
    /// color-binning model on training rows only.
    pub colors: Vec<ProfileColors>,
    pub platform_defaults: BTreeMap<String, String>,
    pub source_vocab_size: usize,
}

impl FeatureTable {
    pub fn vector(&self, row: usize) -> FeatureVector {
        FeatureVector {
            account_id: self.account_ids[row].clone(),
            label: self.labels[row],
            values: self.matrix.row(row).to_vec(),
            availability_mask: self.mask.row(row).iter().map(|&v| v != 0.0).collect(),
        }
    }

    /// Fold-refit hook for the color-bin columns of this table.
    pub fn color_fold_fit(&self) -> ColorFoldFit {
        ColorFoldFit {
            colors: self.colors.clone(),
            defaults: self.platform_defaults.clone(),
            columns: color_refit_columns(&self.catalog),
        }
    }

    /// Restrict to the given catalog feature subset (by name), keeping order.
    pub fn subset(&self, names: &[String]) -> FeatureTable {
        let cols: Vec<usize> = names
            .iter()
            .filter_map(|n| self.catalog.position(n))
            .collect();
        let defs: Vec<crate::catalog::FeatureDef> =
            cols.iter().map(|&c| self.catalog.def(c).clone()).collect();
        FeatureTable {
            dataset_id: self.dataset_id.clone(),
            catalog: defs.into(),
            account_ids: self.account_ids.clone(),
            labels: self.labels.clone(),
            matrix: self.matrix.select_columns(&cols),
            mask: self.mask.select_columns(&cols),
            colors: self.colors.clone(),
            platform_defaults: self.platform_defaults.clone(),
            source_vocab_size: self.source_vocab_size,
        }
    }
}

/// Extraction bookkeeping for the run log.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExtractStats {
    /// Aggregate per-family compute seconds, summed across workers.
    pub family_seconds: BTreeMap<String, f64>,
    pub wall_seconds: f64,
    /// Accounts with zero tweets, per label; their content features are
    /// fully masked rather than dropped.
    pub accounts_without_tweets: BTreeMap<String, usize>,
    pub source_vocab_size: usize,
}

const FAMILY_NAMES: [&str; 7] = [
    "preprocess",
    "social",
    "temporal",
    "readability",
    "stylometry",
    "platform",
    "raw",
];

struct Row {
    values: Vec<f64>,
    mask: Vec<f64>,
    family_seconds: [f64; 7],
}

struct RowSink<'a> {
    catalog: &'a FeatureCatalog,
    values: Vec<f64>,
    mask: Vec<f64>,
}

impl RowSink<'_> {
    /// Place a value by feature name; names outside the catalog (features
    /// unavailable on this dataset) are dropped, which keeps availability
    /// sound by construction. Non-finite values impute to 0 and clear the
    /// mask bit.
    fn set(&mut self, name: &str, value: f64, present: bool) {
        if let Some(i) = self.catalog.position(name) {
            if present && value.is_finite() {
                self.values[i] = value;
                self.mask[i] = 1.0;
            } else {
                self.values[i] = 0.0;
                self.mask[i] = 0.0;
            }
        }
    }
}

fn extract_row(
    account: &AccountRecord,
    tweets: &[TweetRecord],
    catalog: &FeatureCatalog,
    color_model: &ColorBinningModel,
    defaults: &BTreeMap<String, String>,
    vocab_size: usize,
    detector: &dyn LanguageDetector,
) -> Row {
    let mut sink = RowSink {
        catalog,
        values: vec![0.0; catalog.len()],
        mask: vec![0.0; catalog.len()],
    };
    let mut family_seconds = [0.0f64; 7];
    let has_tweets = !tweets.is_empty();

    // preprocess: entity extraction, tokenization, per-tweet stats
    let t0 = Instant::now();
    let agg = AccountAggregates::from_tweets(tweets);
    let views: Vec<TweetView> = tweets
        .iter()
        .map(|t| TweetView::build(&t.text, detector))
        .collect();
    family_seconds[0] = t0.elapsed().as_secs_f64();

    // social
    let t0 = Instant::now();
    let ratios = account_ratios(account);
    sink.set("followers_growth_rate", ratios.followers_growth_rate, true);
    sink.set("friends_growth_rate", ratios.friends_growth_rate, true);
    sink.set("favourites_growth_rate", ratios.favourites_growth_rate, true);
    sink.set("listed_growth_rate", ratios.listed_growth_rate, true);
    sink.set("followers_friends_ratio", ratios.followers_friends_ratio, true);
    sink.set("average_favorites", ratios.average_favorites, true);
    sink.set("reputation", ratios.reputation, true);
    sink.set(
        "average_retweets",
        agg.sum_retweet_counts as f64 / (account.followers_count.max(0) as f64).max(1.0),
        has_tweets,
    );
    let temporal = temporal_features(&agg);
    sink.set("ratio_retweet", temporal.ratio_retweet, has_tweets);
    sink.set(
        "credibility",
        credibility(&agg, account.followers_count),
        has_tweets,
    );
    sink.set(
        "engagement",
        engagement(account.followers_count, account.listed_count, &agg),
        has_tweets,
    );
    family_seconds[1] = t0.elapsed().as_secs_f64();

    // temporal
    let t0 = Instant::now();
    sink.set("user_age", user_age_days(account), true);
    sink.set("tweet_freq", account_ratios(account).tweet_freq, true);
    sink.set(
        "average_time_between_tweets",
        temporal.average_time_between_tweets.unwrap_or(0.0),
        temporal.average_time_between_tweets.is_some(),
    );
    sink.set(
        "idle_hours",
        temporal.idle_hours.unwrap_or(0.0),
        temporal.idle_hours.is_some(),
    );
    let entities: Vec<_> = views.iter().map(|v| v.entities.clone()).collect();
    let dna = dna_features(tweets, &entities);
    sink.set("size_dna_type", dna.size_dna_type, has_tweets);
    sink.set("compress_size_dna_type", dna.compress_size_dna_type, has_tweets);
    sink.set("compression_ratio_type", dna.compression_ratio_type, has_tweets);
    sink.set("size_dna_content", dna.size_dna_content, has_tweets);
    sink.set(
        "compress_size_dna_content",
        dna.compress_size_dna_content,
        has_tweets,
    );
    sink.set(
        "compression_ratio_content",
        dna.compression_ratio_content,
        has_tweets,
    );
    family_seconds[2] = t0.elapsed().as_secs_f64();

    // readability
    let t0 = Instant::now();
    let (desc_read, desc_present) = description_readability(account);
    for (name, value) in [
        ("description_flesch_reading_ease", desc_read.flesch_reading_ease),
        ("description_flesch_kincaid_grade", desc_read.flesch_kincaid_grade),
        ("description_smog_index", desc_read.smog_index),
        ("description_coleman_liau_index", desc_read.coleman_liau_index),
        (
            "description_automated_readability_index",
            desc_read.automated_readability_index,
        ),
        (
            "description_dale_chall_readability_score",
            desc_read.dale_chall_readability_score,
        ),
        ("description_difficult_words", desc_read.difficult_words),
        ("description_linsear_write_formula", desc_read.linsear_write_formula),
        ("description_gunning_fog", desc_read.gunning_fog),
    ] {
        sink.set(name, value, desc_present);
    }
    let (tweet_read, tweets_readable) = tweet_readability(&views);
    for (name, value) in [
        ("flesch_reading_ease", tweet_read.flesch_reading_ease),
        ("flesch_kincaid_grade", tweet_read.flesch_kincaid_grade),
        ("smog_index", tweet_read.smog_index),
        ("coleman_liau_index", tweet_read.coleman_liau_index),
        (
            "automated_readability_index",
            tweet_read.automated_readability_index,
        ),
        (
            "dale_chall_readability_score",
            tweet_read.dale_chall_readability_score,
        ),
        ("difficult_words", tweet_read.difficult_words),
        ("linsear_write_formula", tweet_read.linsear_write_formula),
        ("gunning_fog", tweet_read.gunning_fog),
    ] {
        sink.set(name, value, tweets_readable);
    }
    family_seconds[3] = t0.elapsed().as_secs_f64();

    // stylometry
    let t0 = Instant::now();
    let nf = name_features(account);
    for (name, value) in [
        ("screen_name_length", nf.screen_name_length),
        ("name_length", nf.name_length),
        ("description_length", nf.description_length),
        ("description_digits_count", nf.description_digits_count),
        ("description_mean_bigram_freq", nf.description_mean_bigram_freq),
        ("screen_name_digits_count", nf.screen_name_digits_count),
        ("name_digits_count", nf.name_digits_count),
        ("screen_name_mean_bigram_freq", nf.screen_name_mean_bigram_freq),
        ("screen_name_entropy", nf.screen_name_entropy),
        ("name_mean_bigram_freq", nf.name_mean_bigram_freq),
        ("name_entropy", nf.name_entropy),
        ("description_entropy", nf.description_entropy),
        ("name_sim", nf.name_sim),
        ("name_ratio", nf.name_ratio),
        ("name_contains_bot", nf.name_contains_bot),
        ("screen_name_contains_bot", nf.screen_name_contains_bot),
        ("description_contains_bot", nf.description_contains_bot),
        ("description_hashtag_count", nf.description_hashtag_count),
        ("description_url_count", nf.description_url_count),
        ("description_unique_url_count", nf.description_unique_url_count),
        (
            "description_unique_mention_count",
            nf.description_unique_mention_count,
        ),
        (
            "description_fraction_of_words_lowercase",
            nf.description_fraction_of_words_lowercase,
        ),
        (
            "description_fraction_of_words_uppercase",
            nf.description_fraction_of_words_uppercase,
        ),
        (
            "description_fraction_of_words_tilecase",
            nf.description_fraction_of_words_tilecase,
        ),
        ("description_word_count", nf.description_word_count),
        ("description_sentence_count", nf.description_sentence_count),
        ("description_average_word_length", nf.description_average_word_length),
        (
            "description_average_words_per_sentence",
            nf.description_average_words_per_sentence,
        ),
    ] {
        sink.set(name, value, true);
    }
    let style = tweet_stylometry(&views);
    for (name, value) in [
        ("bot_reference_mean", style.bot_reference_mean),
        ("average_tweet_length", style.average_tweet_length),
        ("num_unique_urls_mean", style.num_unique_urls_mean),
        ("num_unique_mentions_mean", style.num_unique_mentions_mean),
        ("max_urls_in_a_tweet", style.max_urls_in_a_tweet),
        ("max_hashtags_in_a_tweet", style.max_hashtags_in_a_tweet),
        ("max_mentions_in_a_tweet", style.max_mentions_in_a_tweet),
        ("average_tweets_only_url", style.average_tweets_only_url),
        ("average_elongated_words", style.average_elongated_words),
        ("num_unique_langs", style.num_unique_langs),
        ("word_count_mean", style.word_count_mean),
        ("sentence_count_mean", style.sentence_count_mean),
        ("average_word_length", style.average_word_length),
        ("average_words_lowercase", style.average_words_lowercase),
        ("average_words_uppercase", style.average_words_uppercase),
        ("average_words_titlecase", style.average_words_titlecase),
        ("tweets_sim_length", style.tweets_sim_length),
        ("tweets_sim_punctuation", style.tweets_sim_punctuation),
    ] {
        sink.set(name, value, has_tweets);
    }
    family_seconds[4] = t0.elapsed().as_secs_f64();

    // platform
    let t0 = Instant::now();
    let colors = ProfileColors::from_account(account);
    write_color_bins(&mut sink, &colors, color_model);
    sink.set(
        "profile_background_image_url_default_other_none",
        background_image_level(colors.background_image_url.as_deref(), defaults),
        true,
    );
    sink.set(
        "has_profile_background_tile",
        f64::from(colors.background_tile),
        true,
    );
    let src = source_features(tweets, vocab_size);
    sink.set("different_sources", src.different_sources, src.present && vocab_size > 0);
    for (i, cat) in content::SOURCE_CATEGORIES.iter().enumerate() {
        let name = format!("source_{}_percentage", cat.replace('-', "_"));
        sink.set(&name, src.fractions[i], src.present);
    }
    sink.set("source_other_percentage", src.fractions[12], src.present);
    family_seconds[5] = t0.elapsed().as_secs_f64();

    // raw
    let t0 = Instant::now();
    sink.set("followers_count", account.followers_count.max(0) as f64, true);
    sink.set("friends_count", account.friends_count.max(0) as f64, true);
    sink.set("favourites_count", account.favourites_count.max(0) as f64, true);
    sink.set("listed_count", account.listed_count.max(0) as f64, true);
    sink.set("statuses_count", account.statuses_count.max(0) as f64, true);
    sink.set("verified", f64::from(account.verified), true);
    sink.set("protected", f64::from(account.protected), true);
    sink.set("geo_enabled", f64::from(account.geo_enabled), true);
    sink.set("default_profile", f64::from(account.default_profile), true);
    sink.set(
        "default_profile_image",
        f64::from(account.default_profile_image),
        true,
    );
    sink.set(
        "profile_use_background_image",
        f64::from(account.profile_use_background_image),
        true,
    );
    family_seconds[6] = t0.elapsed().as_secs_f64();

    Row {
        values: sink.values,
        mask: sink.mask,
        family_seconds,
    }
}

fn write_color_bins(sink: &mut RowSink<'_>, colors: &ProfileColors, model: &ColorBinningModel) {
    for field in COLOR_FIELDS {
        let value = colors.fields.get(field).and_then(|v| v.as_deref());
        let bin = model.bin(field, value);
        let present = bin.is_some();
        for (name, expected) in bin_column_names(field) {
            sink.set(
                &name,
                f64::from(bin == Some(expected)),
                present,
            );
        }
    }
}

/// Column names for one color field's three bins. The background field uses
/// the `is_<bin>` naming (and default/uncommon/common order); the other four
/// use `<field>_<bin>`.
fn bin_column_names(field: &str) -> Vec<(String, Bin)> {
    if field == "profile_background_color" {
        vec![
            (format!("{field}_is_default"), Bin::Default),
            (format!("{field}_is_uncommon"), Bin::Uncommon),
            (format!("{field}_is_common"), Bin::Common),
        ]
    } else {
        vec![
            (format!("{field}_default"), Bin::Default),
            (format!("{field}_common"), Bin::Common),
            (format!("{field}_uncommon"), Bin::Uncommon),
        ]
    }
}

/// The color-bin columns of a catalog, with the field and bin each encodes.
pub fn color_refit_columns(catalog: &FeatureCatalog) -> Vec<(usize, String, Bin)> {
    let mut out = Vec::new();
    for field in COLOR_FIELDS {
        for (name, bin) in bin_column_names(field) {
            if let Some(col) = catalog.position(&name) {
                out.push((col, field.to_string(), bin));
            }
        }
    }
    out
}

/// Refits the color-binning model on the fold's training rows and rewrites
/// the fifteen bin columns for every row.
pub struct ColorFoldFit {
    pub colors: Vec<ProfileColors>,
    pub defaults: BTreeMap<String, String>,
    pub columns: Vec<(usize, String, Bin)>,
}

impl FoldFit for ColorFoldFit {
    fn refit(&self, train_rows: &[usize], matrix: &mut Matrix, audit: Option<FitAudit<'_>>) {
        if self.columns.is_empty() {
            return;
        }
        let train_colors: Vec<ProfileColors> = train_rows
            .iter()
            .map(|&r| self.colors[r].clone())
            .collect();
        let model = match fit_color_model(&train_colors, &self.defaults) {
            Ok(m) => m,
            Err(_) => return, // empty training split: keep baked values
        };
        if let Some(a) = audit {
            a.trace
                .record(a.fold, "color_model", train_rows, crate::learn::fingerprint(&model));
        }
        for r in 0..matrix.rows() {
            for (col, field, bin) in &self.columns {
                let value = self.colors[r].fields.get(field).and_then(|v| v.as_deref());
                let got = model.bin(field, value);
                let v = if got.is_some() {
                    f64::from(got == Some(*bin))
                } else {
                    0.0
                };
                matrix.set(r, *col, v);
            }
        }
    }
}

/// Inputs to one extraction run.
pub struct ExtractInput<'a> {
    pub dataset_id: &'a str,
    pub catalog: &'a FeatureCatalog,
    pub accounts: &'a [AccountRecord],
    pub tweets: &'a BTreeMap<String, Vec<TweetRecord>>,
    pub platform_defaults: &'a BTreeMap<String, String>,
    pub detector: &'a dyn LanguageDetector,
}

/// Extract the full feature table. The color model baked into the matrix is
/// fit on the whole dataset; cross-validation paths refit it per fold via
/// [`FeatureTable::color_fold_fit`].
pub fn extract_features(input: &ExtractInput<'_>) -> Result<(FeatureTable, ExtractStats)> {
    let started = Instant::now();
    let empty: Vec<TweetRecord> = Vec::new();

    // Serial pre-passes: dataset-wide source vocabulary and color model.
    let mut vocab: BTreeSet<&str> = BTreeSet::new();
    for tweets in input.tweets.values() {
        for t in tweets {
            if let Some(s) = t.source.as_deref() {
                if !s.is_empty() {
                    vocab.insert(s);
                }
            }
        }
    }
    let colors: Vec<ProfileColors> = input
        .accounts
        .iter()
        .map(ProfileColors::from_account)
        .collect();
    let color_model = fit_color_model(&colors, input.platform_defaults)?;

    let rows: Vec<Row> = input
        .accounts
        .par_iter()
        .map(|account| {
            let tweets = input.tweets.get(&account.id).unwrap_or(&empty);
            extract_row(
                account,
                tweets,
                input.catalog,
                &color_model,
                input.platform_defaults,
                vocab.len(),
                input.detector,
            )
        })
        .collect();

    let mut family_seconds = BTreeMap::new();
    for (i, name) in FAMILY_NAMES.iter().enumerate() {
        family_seconds.insert(
            name.to_string(),
            rows.iter().map(|r| r.family_seconds[i]).sum(),
        );
    }
    let mut accounts_without_tweets: BTreeMap<String, usize> = BTreeMap::new();
    for account in input.accounts {
        if input.tweets.get(&account.id).map_or(true, Vec::is_empty) {
            *accounts_without_tweets
                .entry(account.label.to_string())
                .or_insert(0) += 1;
        }
    }

    let matrix = Matrix::from_rows(rows.iter().map(|r| r.values.clone()).collect());
    let mask = Matrix::from_rows(rows.into_iter().map(|r| r.mask).collect());

    let stats = ExtractStats {
        family_seconds,
        wall_seconds: started.elapsed().as_secs_f64(),
        accounts_without_tweets,
        source_vocab_size: vocab.len(),
    };
    Ok((
        FeatureTable {
            dataset_id: input.dataset_id.to_string(),
            catalog: input.catalog.clone(),
            account_ids: input.accounts.iter().map(|a| a.id.clone()).collect(),
            labels: input.accounts.iter().map(|a| a.label).collect(),
            matrix,
            mask,
            colors,
            platform_defaults: input.platform_defaults.clone(),
            source_vocab_size: vocab.len(),
        },
        stats,
    ))
}
