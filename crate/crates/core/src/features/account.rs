//! Account-based features: profile ratios, name/description stylometry,
//! description readability, and the color-binning model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::COLOR_FIELDS;
use crate::error::{Error, Result};
use crate::textstats::{
    casing_fractions, extract_entities, mean_bigram_freq, readability, shannon_entropy,
    string_similarity, tokenize, Readability,
};
use crate::types::AccountRecord;

/// Account age in days, measured against the dataset crawl instant and
/// floored at one day so per-age rates stay bounded.
pub fn user_age_days(a: &AccountRecord) -> f64 {
    let seconds = (a.crawl_time - a.created_at).num_seconds() as f64;
    (seconds / 86_400.0).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccountRatios {
    pub followers_growth_rate: f64,
    pub friends_growth_rate: f64,
    pub favourites_growth_rate: f64,
    pub listed_growth_rate: f64,
    pub tweet_freq: f64,
    pub followers_friends_ratio: f64,
    pub average_favorites: f64,
    pub reputation: f64,
}

/// Growth rates and interaction ratios with max(., 1) denominator guards.
pub fn account_ratios(a: &AccountRecord) -> AccountRatios {
    let age = user_age_days(a);
    let followers = a.followers_count.max(0) as f64;
    let friends = a.friends_count.max(0) as f64;
    let favourites = a.favourites_count.max(0) as f64;
    let listed = a.listed_count.max(0) as f64;
    let statuses = a.statuses_count.max(0) as f64;
    AccountRatios {
        followers_growth_rate: followers / age,
        friends_growth_rate: friends / age,
        favourites_growth_rate: favourites / age,
        listed_growth_rate: listed / age,
        tweet_freq: statuses / age,
        followers_friends_ratio: followers / friends.max(1.0),
        average_favorites: favourites / followers.max(1.0),
        reputation: followers / (followers + friends).max(1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NameFeatures {
    pub screen_name_length: f64,
    pub name_length: f64,
    pub description_length: f64,
    pub screen_name_digits_count: f64,
    pub name_digits_count: f64,
    pub description_digits_count: f64,
    pub screen_name_entropy: f64,
    pub name_entropy: f64,
    pub description_entropy: f64,
    pub screen_name_mean_bigram_freq: f64,
    pub name_mean_bigram_freq: f64,
    pub description_mean_bigram_freq: f64,
    pub name_sim: f64,
    pub name_ratio: f64,
    pub name_contains_bot: f64,
    pub screen_name_contains_bot: f64,
    pub description_contains_bot: f64,
    pub description_hashtag_count: f64,
    pub description_url_count: f64,
    pub description_unique_url_count: f64,
    pub description_unique_mention_count: f64,
    pub description_fraction_of_words_lowercase: f64,
    pub description_fraction_of_words_uppercase: f64,
    pub description_fraction_of_words_tilecase: f64,
    pub description_word_count: f64,
    pub description_sentence_count: f64,
    pub description_average_word_length: f64,
    pub description_average_words_per_sentence: f64,
}

fn digit_count(s: &str) -> f64 {
    s.chars().filter(|c| c.is_ascii_digit()).count() as f64
}

fn contains_bot(s: &str) -> f64 {
    f64::from(s.to_lowercase().contains("bot"))
}

/// Stylometry of name, screen name and description. Entity counts come from
/// the raw description; word-level statistics use the stripped text.
pub fn name_features(a: &AccountRecord) -> NameFeatures {
    let extraction = extract_entities(&a.description);
    let tokens = tokenize(&extraction.stripped);
    let (lower, upper, title) = casing_fractions(&tokens);
    let words = tokens.words.len() as f64;
    let sentences = tokens.sentences.len() as f64;
    let word_chars: f64 = tokens.words.iter().map(|w| w.chars().count() as f64).sum();

    NameFeatures {
        screen_name_length: a.screen_name.chars().count() as f64,
        name_length: a.name.chars().count() as f64,
        description_length: a.description.chars().count() as f64,
        screen_name_digits_count: digit_count(&a.screen_name),
        name_digits_count: digit_count(&a.name),
        description_digits_count: digit_count(&a.description),
        screen_name_entropy: shannon_entropy(&a.screen_name),
        name_entropy: shannon_entropy(&a.name),
        description_entropy: shannon_entropy(&a.description),
        screen_name_mean_bigram_freq: mean_bigram_freq(&a.screen_name),
        name_mean_bigram_freq: mean_bigram_freq(&a.name),
        description_mean_bigram_freq: mean_bigram_freq(&a.description),
        name_sim: string_similarity(&a.name, &a.screen_name),
        name_ratio: a.name.chars().count() as f64
            / (a.screen_name.chars().count() as f64).max(1.0),
        name_contains_bot: contains_bot(&a.name),
        screen_name_contains_bot: contains_bot(&a.screen_name),
        description_contains_bot: contains_bot(&a.description),
        description_hashtag_count: extraction.entities.hashtags.len() as f64,
        description_url_count: extraction.entities.urls.len() as f64,
        description_unique_url_count: extraction.entities.unique_urls() as f64,
        description_unique_mention_count: extraction.entities.unique_mentions() as f64,
        description_fraction_of_words_lowercase: lower,
        description_fraction_of_words_uppercase: upper,
        description_fraction_of_words_tilecase: title,
        description_word_count: words,
        description_sentence_count: sentences,
        description_average_word_length: if words > 0.0 { word_chars / words } else { 0.0 },
        description_average_words_per_sentence: if sentences > 0.0 { words / sentences } else { 0.0 },
    }
}

/// Readability of the stripped description; the flag is false (masked) when
/// the description is empty or degenerate.
pub fn description_readability(a: &AccountRecord) -> (Readability, bool) {
    let stripped = extract_entities(&a.description).stripped;
    let r = readability(&tokenize(&stripped));
    let present = !r.degenerate;
    (r, present)
}

/// Raw color fields of one account, the input to color binning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileColors {
    /// Field name -> normalized hex value, for the five bin-able fields.
    pub fields: BTreeMap<String, Option<String>>,
    pub background_image_url: Option<String>,
    pub background_tile: bool,
}

impl ProfileColors {
    pub fn from_account(a: &AccountRecord) -> ProfileColors {
        let mut fields = BTreeMap::new();
        fields.insert(COLOR_FIELDS[0].to_string(), a.profile_background_color.clone());
        fields.insert(COLOR_FIELDS[1].to_string(), a.profile_link_color.clone());
        fields.insert(
            COLOR_FIELDS[2].to_string(),
            a.profile_sidebar_border_color.clone(),
        );
        fields.insert(
            COLOR_FIELDS[3].to_string(),
            a.profile_sidebar_fill_color.clone(),
        );
        fields.insert(COLOR_FIELDS[4].to_string(), a.profile_text_color.clone());
        ProfileColors {
            fields,
            background_image_url: a.profile_background_image_url.clone(),
            background_tile: a.profile_background_tile,
        }
    }
}

const COMMON_SET_SIZE: usize = 8;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ColorFieldModel {
    pub default_value: Option<String>,
    /// The eight most frequent non-default values in the fitting split.
    pub common_set: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ColorBinningModel {
    pub fields: BTreeMap<String, ColorFieldModel>,
}

/// Fit the per-field common-color sets on the given accounts (the fitting
/// split). Ties at the cutoff keep the lexicographically smaller hex value.
pub fn fit_color_model(
    colors: &[ProfileColors],
    defaults: &BTreeMap<String, String>,
) -> Result<ColorBinningModel> {
    if colors.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut model = ColorBinningModel::default();
    for field in COLOR_FIELDS {
        let default_value = defaults.get(field).cloned();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for c in colors {
            if let Some(Some(value)) = c.fields.get(field) {
                if Some(value) != default_value.as_ref() {
                    *counts.entry(value.as_str()).or_insert(0) += 1;
                }
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        model.fields.insert(
            field.to_string(),
            ColorFieldModel {
                default_value,
                common_set: ranked
                    .into_iter()
                    .take(COMMON_SET_SIZE)
                    .map(|(v, _)| v.to_string())
                    .collect(),
            },
        );
    }
    Ok(model)
}

/// default / common / uncommon color bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bin {
    Default,
    Common,
    Uncommon,
}

impl ColorBinningModel {
    /// Bin of one field value; `None` when the field is absent.
    pub fn bin(&self, field: &str, value: Option<&str>) -> Option<Bin> {
        let value = value?;
        let fm = self.fields.get(field)?;
        if fm.default_value.as_deref() == Some(value) {
            Some(Bin::Default)
        } else if fm.common_set.iter().any(|c| c == value) {
            Some(Bin::Common)
        } else {
            Some(Bin::Uncommon)
        }
    }
}

/// Three-level background image indicator: none = 0, default = 1, other = 2.
pub fn background_image_level(
    url: Option<&str>,
    defaults: &BTreeMap<String, String>,
) -> f64 {
    match url {
        None => 0.0,
        Some(u) => {
            if defaults.get("profile_background_image_url").map(String::as_str) == Some(u) {
                1.0
            } else {
                2.0
            }
        }
    }
}
