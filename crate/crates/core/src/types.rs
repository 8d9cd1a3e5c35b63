//! Canonical domain types shared by every pipeline stage.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// Binary class label. Multi-class dataset labels collapse to this space
/// through [`DatasetManifest::class_mapping`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Human,
    Bot,
}

impl Label {
    /// Bot is the positive class throughout.
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Human => 0,
            Label::Bot => 1,
        }
    }

    pub fn from_u8(v: u8) -> Label {
        if v == 0 {
            Label::Human
        } else {
            Label::Bot
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Human => write!(f, "human"),
            Label::Bot => write!(f, "bot"),
        }
    }
}

/// Canonical user profile. Counts are signed so that malformed inputs can be
/// represented and flagged by [`validate_account`] instead of wrapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountRecord {
    pub id: String,
    #[serde(with = "chrono::serde::ts_seconds")]
    pub created_at: DateTime<Utc>,
    pub name: String,
    pub screen_name: String,
    pub description: String,
    pub location: String,
    pub url: Option<String>,
    pub protected: bool,
    pub verified: bool,
    pub followers_count: i64,
    pub friends_count: i64,
    pub favourites_count: i64,
    pub listed_count: i64,
    pub statuses_count: i64,
    pub lang: Option<String>,
    pub geo_enabled: bool,
    pub default_profile: bool,
    pub default_profile_image: bool,
    pub profile_background_color: Option<String>,
    pub profile_link_color: Option<String>,
    pub profile_sidebar_border_color: Option<String>,
    pub profile_sidebar_fill_color: Option<String>,
    pub profile_text_color: Option<String>,
    pub profile_background_image_url: Option<String>,
    pub profile_background_tile: bool,
    pub profile_use_background_image: bool,
    pub label: Label,
    /// Dataset reference instant; account age is measured against this.
    #[serde(with = "chrono::serde::ts_seconds")]
    pub crawl_time: DateTime<Utc>,
}

/// Canonical tweet. Optional fields stay absent when the source dataset does
/// not carry them (e.g. TwiBot-20 ships raw text only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub author_id: String,
    #[serde(with = "chrono::serde::ts_seconds_option")]
    pub created_at: Option<DateTime<Utc>>,
    pub text: String,
    pub source: Option<String>,
    pub is_retweet: bool,
    pub is_reply: bool,
    pub num_hashtags: Option<i64>,
    pub num_mentions: Option<i64>,
    pub num_urls: Option<i64>,
    pub retweet_count: Option<i64>,
    pub favorite_count: Option<i64>,
}

/// Dataset file layout plus the mappings needed to canonicalise it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_id: String,
    pub format: DatasetFormat,
    /// Role -> file path. Cresci roles are `users:<class>` / `tweets:<class>`,
    /// TwiBot uses a single `data` role, synthetic uses `spec`.
    pub paths: BTreeMap<String, PathBuf>,
    /// Raw class name -> canonical label; must cover every class in the files.
    pub class_mapping: BTreeMap<String, Label>,
    #[serde(with = "chrono::serde::ts_seconds")]
    pub crawl_time: DateTime<Utc>,
    /// Platform default values per customisation field (hex colors, plus the
    /// default background image URL under `profile_background_image_url`).
    #[serde(default)]
    pub platform_defaults: BTreeMap<String, String>,
    #[serde(default)]
    pub max_tweets_per_user: Option<usize>,
}

/// Normalize a profile color to uppercase 6-digit hex, accepting 3- or
/// 6-digit forms with an optional leading '#'. Returns `None` if the string
/// is not a valid hex color.
pub fn normalize_hex_color(raw: &str) -> Option<String> {
    let s = raw.trim().trim_start_matches('#');
    let valid = s.chars().all(|c| c.is_ascii_hexdigit());
    if !valid {
        return None;
    }
    match s.len() {
        6 => Some(s.to_ascii_uppercase()),
        3 => {
            let mut out = String::with_capacity(6);
            for c in s.chars() {
                let u = c.to_ascii_uppercase();
                out.push(u);
                out.push(u);
            }
            Some(out)
        }
        _ => None,
    }
}

fn check_color(field: &str, value: &Option<String>, out: &mut Vec<String>) {
    if let Some(v) = value {
        let normalized = v.len() == 6
            && v.chars()
                .all(|c| c.is_ascii_hexdigit() && !c.is_ascii_lowercase());
        if !normalized {
            out.push(format!("{field} not a normalized 6-digit hex color"));
        }
    }
}

/// Check every `AccountRecord` invariant, returning human-readable violation
/// strings. Violations are data, not errors: the record is never mutated.
pub fn validate_account(a: &AccountRecord) -> Vec<String> {
    let mut v = Vec::new();
    for (name, count) in [
        ("followers_count", a.followers_count),
        ("friends_count", a.friends_count),
        ("favourites_count", a.favourites_count),
        ("listed_count", a.listed_count),
        ("statuses_count", a.statuses_count),
    ] {
        if count < 0 {
            v.push(format!("{name} negative"));
        }
    }
    if a.crawl_time < a.created_at {
        v.push("crawl_time before created_at".to_string());
    }
    check_color(
        "profile_background_color",
        &a.profile_background_color,
        &mut v,
    );
    check_color("profile_link_color", &a.profile_link_color, &mut v);
    check_color(
        "profile_sidebar_border_color",
        &a.profile_sidebar_border_color,
        &mut v,
    );
    check_color(
        "profile_sidebar_fill_color",
        &a.profile_sidebar_fill_color,
        &mut v,
    );
    check_color("profile_text_color", &a.profile_text_color, &mut v);
    v
}

/// Formats the ingester understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    CresciCsv,
    TwibotJson,
    Synthetic,
}
