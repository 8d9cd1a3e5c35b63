//! Dataset ingestion: Cresci-style CSV pairs, TwiBot-style JSON and the
//! seeded synthetic generator, all canonicalised through the manifest.

mod cache;
mod cresci;
mod synthetic;
mod twibot;

pub use cache::{read_canonical, write_canonical};
pub use synthetic::{default_platform_colors, generate_synthetic, SyntheticSpec};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{AccountRecord, DatasetFormat, DatasetManifest, Label, TweetRecord};

pub type TweetMap = BTreeMap<String, Vec<TweetRecord>>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accounts_read: usize,
    pub tweets_read: usize,
    pub rows_rejected: usize,
    pub per_class_counts: BTreeMap<String, usize>,
}

/// Load a manifest from its JSON file.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let data = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&data)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

/// Parse the dataset named by the manifest into canonical records.
///
/// Accounts come back sorted by id; each account's tweets are chronological
/// (file order when timestamps are absent) and truncated to the
/// `max_tweets_per_user` most recent. Malformed rows are counted, not fatal.
pub fn ingest(
    manifest: &DatasetManifest,
) -> Result<(Vec<AccountRecord>, TweetMap, IngestReport)> {
    let (mut accounts, mut tweets, mut report) = match manifest.format {
        DatasetFormat::CresciCsv => cresci::ingest(manifest)?,
        DatasetFormat::TwibotJson => twibot::ingest(manifest)?,
        DatasetFormat::Synthetic => synthetic::ingest(manifest)?,
    };
    if accounts.is_empty() {
        return Err(Error::EmptyDataset);
    }
    accounts.sort_by(|a, b| a.id.cmp(&b.id));
    accounts.dedup_by(|a, b| a.id == b.id);

    // The crawl instant is the age reference; a record created after it
    // clamps so the age floor applies instead of a negative age.
    for a in &mut accounts {
        if a.crawl_time < a.created_at {
            a.crawl_time = a.created_at;
        }
    }

    // Keep only tweets of known accounts, ordered and truncated.
    let known: BTreeMap<&str, ()> = accounts.iter().map(|a| (a.id.as_str(), ())).collect();
    tweets.retain(|author, _| known.contains_key(author.as_str()));
    for group in tweets.values_mut() {
        sort_and_truncate(group, manifest.max_tweets_per_user);
    }

    report.accounts_read = accounts.len();
    let counted: usize = report.per_class_counts.values().sum();
    debug_assert_eq!(report.accounts_read, counted, "per-class counts must total");
    Ok((accounts, tweets, report))
}

fn sort_and_truncate(group: &mut Vec<TweetRecord>, max: Option<usize>) {
    // Stable by timestamp: untimed tweets keep file order.
    group.sort_by_key(|t| t.created_at);
    if let Some(m) = max {
        if group.len() > m {
            let has_times = group.iter().any(|t| t.created_at.is_some());
            if has_times {
                // most recent m, back in chronological order
                group.drain(..group.len() - m);
            } else {
                group.truncate(m);
            }
        }
    }
}

pub(crate) fn map_class(manifest: &DatasetManifest, raw_class: &str) -> Result<Label> {
    manifest
        .class_mapping
        .get(raw_class)
        .copied()
        .ok_or_else(|| Error::UnmappedClass(raw_class.to_string()))
}

/// Timestamp formats seen across the dataset generations; naive timestamps
/// are taken as UTC.
pub(crate) fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y") {
        return Some(dt.with_timezone(&Utc));
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%d"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(Utc.from_utc_datetime(&naive));
        }
        if fmt == "%Y-%m-%d" {
            if let Ok(date) = chrono::NaiveDate::parse_from_str(s, fmt) {
                return Some(Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).unwrap()));
            }
        }
    }
    if let Ok(epoch) = s.parse::<i64>() {
        return Utc.timestamp_opt(epoch, 0).single();
    }
    None
}

/// Missing count fields impute to 0; non-numeric non-empty values are
/// malformed (`None` means reject the row).
pub(crate) fn parse_count(raw: &str) -> Option<i64> {
    let s = raw.trim();
    if s.is_empty() {
        return Some(0);
    }
    if let Ok(v) = s.parse::<i64>() {
        return Some(v);
    }
    // Some dumps render counts as floats.
    s.parse::<f64>().ok().map(|v| v as i64)
}

pub(crate) fn parse_bool(raw: &str) -> bool {
    matches!(
        raw.trim().to_ascii_lowercase().as_str(),
        "1" | "true" | "t" | "yes" | "y"
    )
}

pub(crate) fn opt_string(raw: &str) -> Option<String> {
    let s = raw.trim();
    (!s.is_empty()).then(|| s.to_string())
}
