//! TwiBot-style JSON: one file of account objects, each with a `profile`
//! section, a list of raw tweet texts and a label. Unlabeled entries (the
//! support set) are skipped.

use std::collections::BTreeMap;
use std::fs;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::types::{normalize_hex_color, AccountRecord, DatasetManifest, TweetRecord};

use super::{map_class, parse_timestamp, IngestReport, TweetMap};

fn as_trimmed(value: Option<&Value>) -> String {
    match value {
        Some(Value::String(s)) => s.trim().to_string(),
        Some(Value::Number(n)) => n.to_string(),
        Some(Value::Bool(b)) => b.to_string(),
        _ => String::new(),
    }
}

fn opt_field(value: Option<&Value>) -> Option<String> {
    let s = as_trimmed(value);
    // TwiBot dumps spell missing values as the string "None".
    (!s.is_empty() && s != "None" && s != "null").then_some(s)
}

fn count_field(profile: &Value, name: &str) -> Option<i64> {
    match profile.get(name) {
        None | Some(Value::Null) => Some(0),
        Some(Value::Number(n)) => n.as_i64(),
        Some(Value::String(s)) => super::parse_count(s),
        _ => None,
    }
}

fn bool_field(profile: &Value, name: &str) -> bool {
    match profile.get(name) {
        Some(Value::Bool(b)) => *b,
        Some(Value::String(s)) => super::parse_bool(s),
        _ => false,
    }
}

fn parse_entry(entry: &Value, manifest: &DatasetManifest) -> Result<Option<(AccountRecord, Vec<TweetRecord>)>> {
    let raw_label = opt_field(entry.get("label"));
    let Some(raw_label) = raw_label else {
        return Ok(None); // unlabeled support entry
    };
    let label = map_class(manifest, &raw_label)?;

    let id = match opt_field(entry.get("ID")).or_else(|| opt_field(entry.get("id"))) {
        Some(id) => id,
        None => return Ok(None),
    };
    let default_profile_obj = Value::Object(Default::default());
    let profile = entry.get("profile").unwrap_or(&default_profile_obj);

    let Some(created_at) = opt_field(profile.get("created_at")).and_then(|s| parse_timestamp(&s))
    else {
        return Ok(None);
    };

    let counts = [
        count_field(profile, "followers_count"),
        count_field(profile, "friends_count"),
        count_field(profile, "favourites_count"),
        count_field(profile, "listed_count"),
        count_field(profile, "statuses_count"),
    ];
    if counts.iter().any(|c| c.map_or(true, |v| v < 0)) {
        return Ok(None);
    }

    let color = |name: &str| opt_field(profile.get(name)).and_then(|v| normalize_hex_color(&v));

    let account = AccountRecord {
        id: id.clone(),
        created_at,
        name: opt_field(profile.get("name")).unwrap_or_default(),
        screen_name: opt_field(profile.get("screen_name"))
            .or_else(|| opt_field(profile.get("username")))
            .unwrap_or_default(),
        description: opt_field(profile.get("description")).unwrap_or_default(),
        location: opt_field(profile.get("location")).unwrap_or_default(),
        url: opt_field(profile.get("url")),
        protected: bool_field(profile, "protected"),
        verified: bool_field(profile, "verified"),
        followers_count: counts[0].unwrap(),
        friends_count: counts[1].unwrap(),
        favourites_count: counts[2].unwrap(),
        listed_count: counts[3].unwrap(),
        statuses_count: counts[4].unwrap(),
        lang: opt_field(profile.get("lang")),
        geo_enabled: bool_field(profile, "geo_enabled"),
        default_profile: bool_field(profile, "default_profile"),
        default_profile_image: bool_field(profile, "default_profile_image"),
        profile_background_color: color("profile_background_color"),
        profile_link_color: color("profile_link_color"),
        profile_sidebar_border_color: color("profile_sidebar_border_color"),
        profile_sidebar_fill_color: color("profile_sidebar_fill_color"),
        profile_text_color: color("profile_text_color"),
        profile_background_image_url: opt_field(profile.get("profile_background_image_url")),
        profile_background_tile: bool_field(profile, "profile_background_tile"),
        profile_use_background_image: bool_field(profile, "profile_use_background_image"),
        label,
        crawl_time: manifest.crawl_time,
    };

    // Tweets arrive as raw text only; every optional field stays absent and
    // the type markers come from text prefixes.
    let tweets = match entry.get("tweet") {
        Some(Value::Array(items)) => items
            .iter()
            .filter_map(|t| t.as_str())
            .map(|text| {
                let is_retweet = text.starts_with("RT @");
                TweetRecord {
                    author_id: id.clone(),
                    created_at: None,
                    text: text.to_string(),
                    source: None,
                    is_retweet,
                    is_reply: !is_retweet && text.starts_with('@'),
                    num_hashtags: None,
                    num_mentions: None,
                    num_urls: None,
                    retweet_count: None,
                    favorite_count: None,
                }
            })
            .collect(),
        _ => Vec::new(),
    };
    Ok(Some((account, tweets)))
}

pub(super) fn ingest(
    manifest: &DatasetManifest,
) -> Result<(Vec<AccountRecord>, TweetMap, IngestReport)> {
    let path = manifest
        .paths
        .get("data")
        .ok_or_else(|| Error::InvalidConfig("twibot-json manifest needs a `data` role".into()))?;
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let json: Value = serde_json::from_str(&raw)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;

    // Either a single array or an object of arrays (train/dev/test splits).
    let mut groups: Vec<&Vec<Value>> = Vec::new();
    match &json {
        Value::Array(items) => groups.push(items),
        Value::Object(map) => {
            for (_, v) in map {
                if let Value::Array(items) = v {
                    groups.push(items);
                }
            }
        }
        _ => {
            return Err(Error::InvalidConfig(format!(
                "{}: expected a JSON array or object of arrays",
                path.display()
            )))
        }
    }

    let mut accounts = Vec::new();
    let mut tweets: TweetMap = BTreeMap::new();
    let mut report = IngestReport::default();
    for group in groups {
        for entry in group {
            match parse_entry(entry, manifest)? {
                Some((account, tw)) => {
                    let raw_label = opt_field(entry.get("label")).unwrap_or_default();
                    *report.per_class_counts.entry(raw_label).or_insert(0) += 1;
                    report.tweets_read += tw.len();
                    if !tw.is_empty() {
                        tweets.entry(account.id.clone()).or_default().extend(tw);
                    }
                    accounts.push(account);
                }
                None => {
                    // Unlabeled entries are skipped by design; anything else
                    // that failed to parse counts as rejected.
                    if opt_field(entry.get("label")).is_some() {
                        report.rows_rejected += 1;
                    }
                }
            }
        }
    }
    Ok((accounts, tweets, report))
}
