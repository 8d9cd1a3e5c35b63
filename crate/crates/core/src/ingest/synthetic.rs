//! Seeded synthetic dataset generator: human-like and bot-like accounts with
//! configurable signal in the account and content dimensions. Used for
//! desk-scale experiments, demos and the end-to-end test suites.

use std::collections::BTreeMap;
use std::fs;

use chrono::Duration;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::unit_rng;
use crate::types::{AccountRecord, DatasetManifest, Label, TweetRecord};

use super::{map_class, IngestReport, TweetMap};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub humans: usize,
    pub bots: usize,
    /// Rough tweets per account; actual counts vary per account.
    pub tweets_per_account: usize,
    /// When false, bot accounts draw their profile from the human
    /// distributions (no account-side signal).
    pub account_signal: bool,
    /// When false, bot accounts tweet like humans (no content-side signal).
    pub content_signal: bool,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 0,
            humans: 50,
            bots: 50,
            tweets_per_account: 20,
            account_signal: true,
            content_signal: true,
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller from two uniforms.
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn lognormal(rng: &mut ChaCha8Rng, mu: f64, sigma: f64) -> i64 {
    (mu + sigma * normal(rng)).exp() as i64
}

const FIRST_NAMES: [&str; 12] = [
    "Alice", "Marco", "Lena", "Tom", "Sofia", "James", "Nora", "Pedro", "Ivy", "Hugo", "Mara",
    "Felix",
];

const TOPICS: [&str; 10] = [
    "coffee", "music", "football", "gardens", "books", "cinema", "travel", "cooking", "running",
    "photography",
];

const HUMAN_TWEETS: [&str; 12] = [
    "Just finished a long walk by the river and the light was beautiful today.",
    "Reading a great book about the history of {topic}, totally recommend it.",
    "Can anyone suggest a good place for {topic} this weekend?",
    "That match last night was unbelievable, still thinking about it.",
    "Slow morning with coffee and the newspaper. Perfect start.",
    "Finally fixed the shelf that has been crooked for months!",
    "My garden is blooming and I could not be happier about it.",
    "Honestly the new album is even better on the third listen.",
    "Long day at work but the sunset on the way home made up for it.",
    "Trying a new recipe tonight, wish me luck with the oven timing.",
    "The museum exhibit on {topic} was worth every minute of the queue.",
    "Sometimes you just need to turn the phone off and breathe a little.",
];

const BOT_TWEETS: [&str; 4] = [
    "Amazing deal on {topic} today! Click here {url} #deal #sale",
    "Get more followers fast {url} #followback #gain",
    "Breaking: incredible {topic} offer ends soon {url} #promo",
    "You will not believe this {topic} trick {url} #viral",
];

const HUMAN_SOURCES: [&str; 5] = [
    "<a href=\"http://twitter.com/download/iphone\" rel=\"nofollow\">Twitter for iPhone</a>",
    "<a href=\"http://twitter.com/download/android\" rel=\"nofollow\">Twitter for Android</a>",
    "web",
    "<a href=\"https://about.twitter.com/products/tweetdeck\" rel=\"nofollow\">TweetDeck</a>",
    "<a href=\"http://twitter.com/#!/download/ipad\" rel=\"nofollow\">Twitter for iPad</a>",
];

const BOT_SOURCES: [&str; 3] = [
    "<a href=\"http://www.tweetadder.com\" rel=\"nofollow\">TweetAdder v4</a>",
    "<a href=\"http://example.com/spammer\" rel=\"nofollow\">Super Poster API</a>",
    "web",
];

const PALETTE: [&str; 10] = [
    "1A1A2E", "16213E", "0F3460", "E94560", "53354A", "903749", "2B2E4A", "F08A5D", "B83B5E",
    "6A2C70",
];

pub const DEFAULT_BACKGROUND: &str = "C0DEED";
pub const DEFAULT_LINK: &str = "0084B4";
pub const DEFAULT_SIDEBAR_BORDER: &str = "C0DEED";
pub const DEFAULT_SIDEBAR_FILL: &str = "DDEEF6";
pub const DEFAULT_TEXT: &str = "333333";
pub const DEFAULT_BACKGROUND_IMAGE: &str = "http://abs.twimg.com/images/themes/theme1/bg.png";

/// Platform default map matching what the generator emits.
pub fn default_platform_colors() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("profile_background_color".into(), DEFAULT_BACKGROUND.into()),
        ("profile_link_color".into(), DEFAULT_LINK.into()),
        (
            "profile_sidebar_border_color".into(),
            DEFAULT_SIDEBAR_BORDER.into(),
        ),
        (
            "profile_sidebar_fill_color".into(),
            DEFAULT_SIDEBAR_FILL.into(),
        ),
        ("profile_text_color".into(), DEFAULT_TEXT.into()),
        (
            "profile_background_image_url".into(),
            DEFAULT_BACKGROUND_IMAGE.into(),
        ),
    ])
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

fn fill_template(rng: &mut ChaCha8Rng, template: &str, url_id: u64) -> String {
    template
        .replace("{topic}", pick(rng, &TOPICS))
        .replace("{url}", &format!("http://short.example/{url_id:x}"))
}

struct Profile {
    created_days_ago: i64,
    followers: i64,
    friends: i64,
    favourites: i64,
    listed: i64,
    statuses: i64,
    custom_colors: bool,
    custom_background: bool,
    tile: bool,
    default_profile: bool,
    default_image: bool,
    verified: bool,
    geo: bool,
    screen_name: String,
    name: String,
    description: String,
}

fn human_profile(rng: &mut ChaCha8Rng) -> Profile {
    let name = format!("{} {}", pick(rng, &FIRST_NAMES), pick(rng, &FIRST_NAMES));
    let screen_name = format!(
        "{}{}",
        name.split(' ').next().unwrap().to_lowercase(),
        rng.gen_range(0..100)
    );
    let description = if rng.gen_bool(0.8) {
        format!(
            "Fan of {} and {}. Posting about life in my own words.",
            pick(rng, &TOPICS),
            pick(rng, &TOPICS)
        )
    } else {
        String::new()
    };
    Profile {
        created_days_ago: rng.gen_range(800..3500),
        followers: lognormal(rng, 4.8, 1.3).max(1),
        friends: lognormal(rng, 4.4, 0.9).max(1),
        favourites: lognormal(rng, 4.0, 1.4),
        listed: rng.gen_range(0..25),
        statuses: rng.gen_range(100..6000),
        custom_colors: rng.gen_bool(0.6),
        custom_background: rng.gen_bool(0.55),
        tile: rng.gen_bool(0.15),
        default_profile: rng.gen_bool(0.25),
        default_image: rng.gen_bool(0.05),
        verified: rng.gen_bool(0.08),
        geo: rng.gen_bool(0.4),
        screen_name,
        name,
    description,
    }
}

fn bot_profile(rng: &mut ChaCha8Rng) -> Profile {
    let stem = pick(rng, &TOPICS);
    let screen_name = if rng.gen_bool(0.15) {
        format!("{stem}bot{}", rng.gen_range(100..99999))
    } else {
        format!("{stem}{}", rng.gen_range(1000..9999999))
    };
    let description = if rng.gen_bool(0.5) {
        String::new()
    } else {
        format!(
            "Best {} deals every day http://promo.example/{} #deals",
            stem,
            rng.gen_range(0..9999)
        )
    };
    Profile {
        created_days_ago: rng.gen_range(20..400),
        followers: lognormal(rng, 1.6, 1.0),
        friends: lognormal(rng, 6.4, 0.7).max(10),
        favourites: lognormal(rng, 1.0, 1.0),
        listed: rng.gen_range(0..2),
        statuses: rng.gen_range(500..20000),
        custom_colors: rng.gen_bool(0.06),
        custom_background: rng.gen_bool(0.08),
        tile: rng.gen_bool(0.02),
        default_profile: rng.gen_bool(0.85),
        default_image: rng.gen_bool(0.4),
        verified: false,
        geo: rng.gen_bool(0.04),
        screen_name,
        name: format!("{stem} updates"),
        description,
    }
}

fn human_tweets(
    rng: &mut ChaCha8Rng,
    id: &str,
    crawl: chrono::DateTime<chrono::Utc>,
    count: usize,
) -> Vec<TweetRecord> {
    let mut at = crawl - Duration::minutes(rng.gen_range(60..6000));
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let template = pick(rng, &HUMAN_TWEETS);
        let url_id = u64::from(rng.gen::<u32>());
        let mut text = fill_template(rng, template, url_id);
        let is_reply = rng.gen_bool(0.12);
        let is_retweet = !is_reply && rng.gen_bool(0.15);
        if is_reply {
            text = format!("@{} {}", pick(rng, &FIRST_NAMES).to_lowercase(), text);
        } else if is_retweet {
            text = format!("RT @{}: {}", pick(rng, &FIRST_NAMES).to_lowercase(), text);
        } else if rng.gen_bool(0.2) {
            text = format!("{text} #{}", pick(rng, &TOPICS));
        }
        out.push(TweetRecord {
            author_id: id.to_string(),
            created_at: Some(at),
            text,
            source: Some(pick(rng, &HUMAN_SOURCES).to_string()),
            is_retweet,
            is_reply,
            num_hashtags: None,
            num_mentions: None,
            num_urls: None,
            retweet_count: Some(lognormal(rng, 0.3, 1.0).max(0)),
            favorite_count: Some(lognormal(rng, 0.6, 1.2).max(0)),
        });
        at -= Duration::minutes(rng.gen_range(30..7000) + i as i64);
    }
    out.reverse();
    out
}

fn bot_tweets(
    rng: &mut ChaCha8Rng,
    id: &str,
    crawl: chrono::DateTime<chrono::Utc>,
    count: usize,
) -> Vec<TweetRecord> {
    let mut at = crawl - Duration::minutes(rng.gen_range(10..200));
    let mut out = Vec::with_capacity(count);
    // A bot cycles a tiny template pool with near-constant cadence.
    let template = pick(rng, &BOT_TWEETS);
    let campaign = rng.gen_range(0..4096);
    for _ in 0..count {
        let text = if rng.gen_bool(0.35) {
            format!("RT @{}: {}", pick(rng, &TOPICS), fill_template(rng, template, campaign))
        } else {
            fill_template(rng, template, campaign)
        };
        let is_retweet = text.starts_with("RT @");
        out.push(TweetRecord {
            author_id: id.to_string(),
            created_at: Some(at),
            text,
            source: Some(pick(rng, &BOT_SOURCES[..2]).to_string()),
            is_retweet,
            is_reply: false,
            num_hashtags: None,
            num_mentions: None,
            num_urls: None,
            retweet_count: Some(0),
            favorite_count: Some(0),
        });
        at -= Duration::minutes(rng.gen_range(2..15));
    }
    out.reverse();
    out
}

fn build_account(
    id: String,
    label: Label,
    class: &str,
    profile: Profile,
    rng: &mut ChaCha8Rng,
    crawl: chrono::DateTime<chrono::Utc>,
) -> AccountRecord {
    let custom = |rng: &mut ChaCha8Rng, default: &str, on: bool| -> Option<String> {
        Some(if on { pick(rng, &PALETTE).to_string() } else { default.to_string() })
    };
    let _ = class;
    AccountRecord {
        created_at: crawl - Duration::days(profile.created_days_ago),
        name: profile.name,
        screen_name: profile.screen_name,
        description: profile.description,
        location: String::new(),
        url: None,
        protected: false,
        verified: profile.verified,
        followers_count: profile.followers,
        friends_count: profile.friends,
        favourites_count: profile.favourites,
        listed_count: profile.listed,
        statuses_count: profile.statuses,
        lang: Some("en".into()),
        geo_enabled: profile.geo,
        default_profile: profile.default_profile,
        default_profile_image: profile.default_image,
        profile_background_color: custom(rng, DEFAULT_BACKGROUND, profile.custom_colors),
        profile_link_color: custom(rng, DEFAULT_LINK, profile.custom_colors),
        profile_sidebar_border_color: custom(rng, DEFAULT_SIDEBAR_BORDER, profile.custom_colors),
        profile_sidebar_fill_color: custom(rng, DEFAULT_SIDEBAR_FILL, profile.custom_colors),
        profile_text_color: custom(rng, DEFAULT_TEXT, profile.custom_colors),
        profile_background_image_url: Some(if profile.custom_background {
            format!("http://img.example/{}.png", rng.gen_range(0..99999))
        } else {
            DEFAULT_BACKGROUND_IMAGE.to_string()
        }),
        profile_background_tile: profile.tile,
        profile_use_background_image: true,
        label,
        crawl_time: crawl,
        id,
    }
}

/// Generate the synthetic corpus for a spec. Deterministic in (spec, crawl).
pub fn generate_synthetic(
    spec: &SyntheticSpec,
    crawl: chrono::DateTime<chrono::Utc>,
) -> (Vec<AccountRecord>, TweetMap) {
    let mut accounts = Vec::with_capacity(spec.humans + spec.bots);
    let mut tweets: TweetMap = BTreeMap::new();

    for i in 0..spec.humans {
        let mut rng = unit_rng(spec.seed, "human", i as u64);
        let id = format!("h{i:06}");
        let profile = human_profile(&mut rng);
        let count = rng.gen_range(spec.tweets_per_account / 2..=spec.tweets_per_account * 3 / 2);
        accounts.push(build_account(
            id.clone(),
            Label::Human,
            "genuine",
            profile,
            &mut rng,
            crawl,
        ));
        tweets.insert(id.clone(), human_tweets(&mut rng, &id, crawl, count.max(1)));
    }
    for i in 0..spec.bots {
        let mut rng = unit_rng(spec.seed, "bot", i as u64);
        let id = format!("b{i:06}");
        let profile = if spec.account_signal {
            bot_profile(&mut rng)
        } else {
            human_profile(&mut rng)
        };
        let count = rng.gen_range(spec.tweets_per_account / 2..=spec.tweets_per_account * 3 / 2);
        accounts.push(build_account(
            id.clone(),
            Label::Bot,
            "automated",
            profile,
            &mut rng,
            crawl,
        ));
        let tw = if spec.content_signal {
            bot_tweets(&mut rng, &id, crawl, count.max(1))
        } else {
            human_tweets(&mut rng, &id, crawl, count.max(1))
        };
        tweets.insert(id, tw);
    }
    (accounts, tweets)
}

pub(super) fn ingest(
    manifest: &DatasetManifest,
) -> Result<(Vec<AccountRecord>, TweetMap, IngestReport)> {
    let path = manifest
        .paths
        .get("spec")
        .ok_or_else(|| Error::InvalidConfig("synthetic manifest needs a `spec` role".into()))?;
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let spec: SyntheticSpec = serde_json::from_str(&raw)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;

    let (accounts, tweets) = generate_synthetic(&spec, manifest.crawl_time);
    let mut report = IngestReport {
        tweets_read: tweets.values().map(Vec::len).sum(),
        ..IngestReport::default()
    };
    for a in &accounts {
        let class = match a.label {
            Label::Human => "genuine",
            Label::Bot => "automated",
        };
        map_class(manifest, class)?;
        *report.per_class_counts.entry(class.to_string()).or_insert(0) += 1;
    }
    Ok((accounts, tweets, report))
}
