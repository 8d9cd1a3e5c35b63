//! Cresci-style CSV pairs: one users file and one tweets file per class,
//! wired through manifest roles `users:<class>` / `tweets:<class>`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{normalize_hex_color, AccountRecord, DatasetManifest, TweetRecord};

use super::{
    map_class, opt_string, parse_bool, parse_count, parse_timestamp, IngestReport, TweetMap,
};

/// Canonical field each known users-file header maps to. The two Cresci
/// generations differ slightly in header naming.
fn user_field(header: &str) -> Option<&'static str> {
    Some(match header {
        "id" | "user_id" => "id",
        "name" => "name",
        "screen_name" | "username" | "user_screen_name" => "screen_name",
        "description" | "bio" => "description",
        "location" => "location",
        "url" => "url",
        "protected" => "protected",
        "verified" => "verified",
        "followers_count" => "followers_count",
        "friends_count" => "friends_count",
        "favourites_count" | "favorites_count" => "favourites_count",
        "listed_count" => "listed_count",
        "statuses_count" | "tweet_count" | "statuses" => "statuses_count",
        "lang" => "lang",
        "geo_enabled" => "geo_enabled",
        "default_profile" => "default_profile",
        "default_profile_image" => "default_profile_image",
        "profile_background_color" => "profile_background_color",
        "profile_link_color" => "profile_link_color",
        "profile_sidebar_border_color" => "profile_sidebar_border_color",
        "profile_sidebar_fill_color" => "profile_sidebar_fill_color",
        "profile_text_color" => "profile_text_color",
        "profile_background_image_url" | "profile_background_image_url_https" => {
            "profile_background_image_url"
        }
        "profile_background_tile" => "profile_background_tile",
        "profile_use_background_image" => "profile_use_background_image",
        "created_at" => "created_at",
        "crawled_at" | "updated" | "timestamp" => "crawl_time",
        _ => return None,
    })
}

fn tweet_field(header: &str) -> Option<&'static str> {
    Some(match header {
        "user_id" | "author_id" => "author_id",
        "text" => "text",
        "source" => "source",
        "created_at" | "timestamp" => "created_at",
        "retweet_count" => "retweet_count",
        "favorite_count" | "favourite_count" => "favorite_count",
        "num_hashtags" => "num_hashtags",
        "num_mentions" => "num_mentions",
        "num_urls" => "num_urls",
        "retweeted_status_id" => "retweeted_status_id",
        "in_reply_to_status_id" | "in_reply_to_user_id" => "in_reply_to",
        _ => return None,
    })
}

struct FieldMap {
    by_canonical: BTreeMap<&'static str, usize>,
}

impl FieldMap {
    fn new(headers: &csv::StringRecord, lookup: fn(&str) -> Option<&'static str>) -> FieldMap {
        let mut by_canonical = BTreeMap::new();
        for (i, h) in headers.iter().enumerate() {
            if let Some(canonical) = lookup(h.trim()) {
                by_canonical.entry(canonical).or_insert(i);
            }
        }
        FieldMap { by_canonical }
    }

    fn get<'r>(&self, row: &'r csv::StringRecord, field: &str) -> &'r str {
        self.by_canonical
            .get(field)
            .and_then(|&i| row.get(i))
            .unwrap_or("")
    }

    fn has(&self, field: &str) -> bool {
        self.by_canonical.contains_key(field)
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path.display().to_string(), io),
            other => Error::InvalidConfig(format!("{}: {other:?}", path.display())),
        })
}

fn parse_account(
    map: &FieldMap,
    row: &csv::StringRecord,
    manifest: &DatasetManifest,
    class: &str,
) -> Option<AccountRecord> {
    let id = opt_string(map.get(row, "id"))?;
    let created_at = parse_timestamp(map.get(row, "created_at"))?;
    let crawl_time = parse_timestamp(map.get(row, "crawl_time")).unwrap_or(manifest.crawl_time);
    let label = map_class(manifest, class).ok()?;

    let mut counts = [0i64; 5];
    for (slot, field) in [
        "followers_count",
        "friends_count",
        "favourites_count",
        "listed_count",
        "statuses_count",
    ]
    .iter()
    .enumerate()
    {
        let v = parse_count(map.get(row, field))?;
        if v < 0 {
            return None;
        }
        counts[slot] = v;
    }

    let color = |field: &str| -> Option<String> {
        opt_string(map.get(row, field)).and_then(|v| normalize_hex_color(&v))
    };

    Some(AccountRecord {
        id,
        created_at,
        name: map.get(row, "name").trim().to_string(),
        screen_name: map.get(row, "screen_name").trim().to_string(),
        description: map.get(row, "description").to_string(),
        location: map.get(row, "location").trim().to_string(),
        url: opt_string(map.get(row, "url")),
        protected: parse_bool(map.get(row, "protected")),
        verified: parse_bool(map.get(row, "verified")),
        followers_count: counts[0],
        friends_count: counts[1],
        favourites_count: counts[2],
        listed_count: counts[3],
        statuses_count: counts[4],
        lang: opt_string(map.get(row, "lang")),
        geo_enabled: parse_bool(map.get(row, "geo_enabled")),
        default_profile: parse_bool(map.get(row, "default_profile")),
        default_profile_image: parse_bool(map.get(row, "default_profile_image")),
        profile_background_color: color("profile_background_color"),
        profile_link_color: color("profile_link_color"),
        profile_sidebar_border_color: color("profile_sidebar_border_color"),
        profile_sidebar_fill_color: color("profile_sidebar_fill_color"),
        profile_text_color: color("profile_text_color"),
        profile_background_image_url: opt_string(map.get(row, "profile_background_image_url")),
        profile_background_tile: parse_bool(map.get(row, "profile_background_tile")),
        profile_use_background_image: parse_bool(map.get(row, "profile_use_background_image")),
        label,
        crawl_time,
    })
}

fn id_marker_set(raw: &str) -> bool {
    let s = raw.trim();
    !s.is_empty() && s != "0"
}

fn parse_tweet(map: &FieldMap, row: &csv::StringRecord) -> Option<TweetRecord> {
    let author_id = opt_string(map.get(row, "author_id"))?;
    let text = map.get(row, "text").to_string();
    let opt_count = |field: &str| -> Option<Option<i64>> {
        if map.has(field) {
            parse_count(map.get(row, field)).map(Some)
        } else {
            Some(None)
        }
    };
    let retweet_count = opt_count("retweet_count")?;
    let favorite_count = opt_count("favorite_count")?;
    let num_hashtags = opt_count("num_hashtags")?;
    let num_mentions = opt_count("num_mentions")?;
    let num_urls = opt_count("num_urls")?;

    let is_retweet = id_marker_set(map.get(row, "retweeted_status_id")) || text.starts_with("RT @");
    let is_reply = !is_retweet
        && if map.has("in_reply_to") {
            id_marker_set(map.get(row, "in_reply_to"))
        } else {
            text.starts_with('@')
        };

    Some(TweetRecord {
        author_id,
        created_at: parse_timestamp(map.get(row, "created_at")),
        text,
        source: opt_string(map.get(row, "source")),
        is_retweet,
        is_reply,
        num_hashtags,
        num_mentions,
        num_urls,
        retweet_count,
        favorite_count,
    })
}

pub(super) fn ingest(
    manifest: &DatasetManifest,
) -> Result<(Vec<AccountRecord>, TweetMap, IngestReport)> {
    let mut accounts = Vec::new();
    let mut tweets: TweetMap = BTreeMap::new();
    let mut report = IngestReport::default();

    for (role, path) in &manifest.paths {
        if let Some(class) = role.strip_prefix("users:") {
            // Unmapped classes abort before any record is emitted.
            map_class(manifest, class)?;
            let mut reader = csv_reader(path)?;
            let headers = reader
                .headers()
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
                .clone();
            let map = FieldMap::new(&headers, user_field);
            for row in reader.records() {
                let Ok(row) = row else {
                    report.rows_rejected += 1;
                    continue;
                };
                match parse_account(&map, &row, manifest, class) {
                    Some(account) => {
                        *report.per_class_counts.entry(class.to_string()).or_insert(0) += 1;
                        accounts.push(account);
                    }
                    None => report.rows_rejected += 1,
                }
            }
        } else if role.starts_with("tweets:") {
            let mut reader = csv_reader(path)?;
            let headers = reader
                .headers()
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
                .clone();
            let map = FieldMap::new(&headers, tweet_field);
            for row in reader.records() {
                let Ok(row) = row else {
                    report.rows_rejected += 1;
                    continue;
                };
                match parse_tweet(&map, &row) {
                    Some(tweet) => {
                        report.tweets_read += 1;
                        tweets.entry(tweet.author_id.clone()).or_default().push(tweet);
                    }
                    None => report.rows_rejected += 1,
                }
            }
        } else {
            return Err(Error::InvalidConfig(format!(
                "unknown cresci-csv manifest role: {role}"
            )));
        }
    }
    Ok((accounts, tweets, report))
}
