//! End-to-end ingestion over real file fixtures in both supported formats.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{TimeZone, Utc};

use botminer_core::error::Error;
use botminer_core::ingest::ingest;
use botminer_core::types::{DatasetFormat, DatasetManifest, Label};

const USERS_GENUINE: &str = "\
id,name,screen_name,followers_count,friends_count,favourites_count,listed_count,statuses_count,created_at,description,verified,protected,geo_enabled,default_profile,default_profile_image,profile_background_color,profile_link_color,profile_sidebar_border_color,profile_sidebar_fill_color,profile_text_color,profile_background_image_url,profile_background_tile,profile_use_background_image,lang,location,url
1001,Alice Smith,alice,250,180,90,3,1200,Fri May 11 06:26:43 +0000 2012,\"Coffee, books and #running fan\",1,0,1,0,0,C0DEED,0084B4,C0DEED,DDEEF6,333333,http://abs.twimg.com/images/themes/theme1/bg.png,0,1,en,Rome,
1002,Bob,bobby,80,120,45,0,300,Sat Jun 02 10:00:00 +0000 2012,,0,0,0,1,0,1a1a2e,E94560,16213E,53354A,0F3460,,0,1,en,,
1003,Carla,carla,abc,10,5,0,40,Sun Jul 01 09:00:00 +0000 2012,oops,0,0,0,0,0,,,,,,,0,1,en,,
";

// The second Cresci generation names some headers differently.
const USERS_FAKE: &str = "\
id,name,username,followers_count,friends_count,favourites_count,listed_count,tweet_count,created_at,description,verified,protected,geo_enabled,default_profile,default_profile_image,profile_background_color,profile_link_color,profile_sidebar_border_color,profile_sidebar_fill_color,profile_text_color,profile_background_image_url,profile_background_tile,profile_use_background_image,lang,location,url,updated
2001,deal stream,dealstream4412,3,2100,0,0,9000,Mon Jan 06 00:00:00 +0000 2014,,0,0,0,1,1,C0DEED,0084B4,C0DEED,DDEEF6,333333,,0,1,en,,,2015-01-02 00:00:00
2002,promo feed,promofeed99821,1,1800,2,0,7000,Tue Feb 11 00:00:00 +0000 2014,Best deals http://x.example,0,0,0,1,1,C0DEED,0084B4,C0DEED,DDEEF6,333333,,0,1,en,,,2015-01-02 00:00:00
";

const TWEETS_GENUINE: &str = "\
id,user_id,text,source,created_at,retweet_count,favorite_count,num_hashtags,num_urls,num_mentions,in_reply_to_status_id,retweeted_status_id
1,1001,Morning run along the river #running,web,2014-05-11 06:00:00,2,5,1,0,0,,
2,1001,@bob that was a great match,web,2014-05-12 07:00:00,0,1,0,0,1,55,
3,1001,RT @carla: the museum was lovely,web,2014-05-13 08:00:00,0,0,0,0,1,,99
4,1001,Slow coffee morning,web,2014-05-14 09:00:00,1,2,0,0,0,,
5,1001,Reading in the garden,web,2014-05-15 10:00:00,0,3,0,0,0,,
6,1002,Fixing the crooked shelf today,<a href=\"http://twitter.com/download/iphone\">Twitter for iPhone</a>,2014-06-01 12:00:00,0,0,0,0,0,,
7,9999,tweet of an unknown account,web,2014-06-01 12:00:00,0,0,0,0,0,,
";

fn write_fixture(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn cresci_manifest(dir: &Path, max_tweets: Option<usize>) -> DatasetManifest {
    let users_genuine = write_fixture(dir, "users_genuine.csv", USERS_GENUINE);
    let users_fake = write_fixture(dir, "users_fake.csv", USERS_FAKE);
    let tweets_genuine = write_fixture(dir, "tweets_genuine.csv", TWEETS_GENUINE);
    DatasetManifest {
        dataset_id: "cresci-17".into(),
        format: DatasetFormat::CresciCsv,
        paths: BTreeMap::from([
            ("users:genuine accounts".to_string(), users_genuine),
            ("users:fake followers".to_string(), users_fake),
            ("tweets:genuine accounts".to_string(), tweets_genuine),
        ]),
        class_mapping: BTreeMap::from([
            ("genuine accounts".to_string(), Label::Human),
            ("fake followers".to_string(), Label::Bot),
        ]),
        crawl_time: Utc.with_ymd_and_hms(2017, 3, 1, 0, 0, 0).unwrap(),
        platform_defaults: BTreeMap::new(),
        max_tweets_per_user: max_tweets,
    }
}

#[test]
fn cresci_csv_pair_parses_with_aliases_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = cresci_manifest(dir.path(), None);
    let (accounts, tweets, report) = ingest(&manifest).unwrap();

    // Row 1003 has followers_count "abc": rejected, everything else loads.
    assert_eq!(report.rows_rejected, 1);
    assert_eq!(report.accounts_read, 4);
    assert_eq!(report.per_class_counts["genuine accounts"], 2);
    assert_eq!(report.per_class_counts["fake followers"], 2);
    assert_eq!(
        report.accounts_read,
        report.per_class_counts.values().sum::<usize>()
    );
    assert_eq!(report.tweets_read, 7);

    // Sorted by id, labels applied from the class mapping.
    let ids: Vec<&str> = accounts.iter().map(|a| a.id.as_str()).collect();
    assert_eq!(ids, vec!["1001", "1002", "2001", "2002"]);
    assert_eq!(accounts[0].label, Label::Human);
    assert_eq!(accounts[2].label, Label::Bot);

    // The `username` alias populated screen_name; colors normalized.
    assert_eq!(accounts[2].screen_name, "dealstream4412");
    assert_eq!(accounts[1].profile_background_color.as_deref(), Some("1A1A2E"));

    // Tweets grouped, unknown authors dropped, retweet/reply markers set.
    assert!(!tweets.contains_key("9999"));
    let alice = &tweets["1001"];
    assert_eq!(alice.len(), 5);
    assert!(alice[1].is_reply && !alice[1].is_retweet);
    assert!(alice[2].is_retweet && !alice[2].is_reply);
}

#[test]
fn truncation_keeps_most_recent_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = cresci_manifest(dir.path(), Some(3));
    let (_, tweets, _) = ingest(&manifest).unwrap();
    let alice = &tweets["1001"];
    assert_eq!(alice.len(), 3);
    let times: Vec<_> = alice.iter().map(|t| t.created_at.unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(
        times[0],
        Utc.with_ymd_and_hms(2014, 5, 13, 8, 0, 0).unwrap(),
        "the two oldest tweets are dropped"
    );
}

#[test]
fn ingest_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = cresci_manifest(dir.path(), Some(2));
    let first = ingest(&manifest).unwrap();
    let second = ingest(&manifest).unwrap();
    assert_eq!(first.0, second.0);
    assert_eq!(first.1, second.1);
    assert_eq!(first.2, second.2);
}

#[test]
fn unmapped_class_raises_before_emission() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = cresci_manifest(dir.path(), None);
    manifest.class_mapping.remove("fake followers");
    assert!(matches!(ingest(&manifest), Err(Error::UnmappedClass(_))));
}

#[test]
fn missing_file_is_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = cresci_manifest(dir.path(), None);
    manifest
        .paths
        .insert("users:genuine accounts".into(), dir.path().join("gone.csv"));
    assert!(matches!(ingest(&manifest), Err(Error::IoFailure { .. })));
}

#[test]
fn empty_dataset_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let users = write_fixture(
        dir.path(),
        "empty.csv",
        "id,name,screen_name,created_at\n",
    );
    let manifest = DatasetManifest {
        dataset_id: "cresci-17".into(),
        format: DatasetFormat::CresciCsv,
        paths: BTreeMap::from([("users:genuine accounts".to_string(), users)]),
        class_mapping: BTreeMap::from([("genuine accounts".to_string(), Label::Human)]),
        crawl_time: Utc.with_ymd_and_hms(2017, 3, 1, 0, 0, 0).unwrap(),
        platform_defaults: BTreeMap::new(),
        max_tweets_per_user: None,
    };
    assert!(matches!(ingest(&manifest), Err(Error::EmptyDataset)));
}

const TWIBOT_JSON: &str = r#"{
  "train": [
    {
      "ID": 12345,
      "profile": {
        "name": "Carol ",
        "screen_name": "carol ",
        "followers_count": "42 ",
        "friends_count": "10 ",
        "favourites_count": "5 ",
        "listed_count": "1 ",
        "statuses_count": "77 ",
        "created_at": "Mon Apr 02 01:35:30 +0000 2012 ",
        "description": "hello there",
        "verified": "False ",
        "protected": "False ",
        "profile_background_color": "C0DEED ",
        "lang": "en"
      },
      "tweet": ["RT @x: good morning", "@bob hello!", "nice day for a walk"],
      "domain": ["politics"],
      "label": "0"
    },
    {
      "ID": 67890,
      "profile": {
        "name": "promo",
        "screen_name": "promo99",
        "followers_count": "2",
        "friends_count": "900",
        "favourites_count": "0",
        "listed_count": "0",
        "statuses_count": "5000",
        "created_at": "Mon Sep 09 00:00:00 +0000 2019",
        "description": "None",
        "verified": "False"
      },
      "tweet": null,
      "label": "1"
    },
    {
      "ID": 55555,
      "profile": {
        "name": "support-node",
        "created_at": "Mon Sep 09 00:00:00 +0000 2019"
      },
      "tweet": [],
      "label": null
    }
  ]
}"#;

#[test]
fn twibot_json_parses_labeled_entries_only() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture(dir.path(), "twibot.json", TWIBOT_JSON);
    let manifest = DatasetManifest {
        dataset_id: "twibot-20".into(),
        format: DatasetFormat::TwibotJson,
        paths: BTreeMap::from([("data".to_string(), data)]),
        class_mapping: BTreeMap::from([
            ("0".to_string(), Label::Human),
            ("1".to_string(), Label::Bot),
        ]),
        crawl_time: Utc.with_ymd_and_hms(2020, 9, 1, 0, 0, 0).unwrap(),
        platform_defaults: BTreeMap::new(),
        max_tweets_per_user: Some(200),
    };
    let (accounts, tweets, report) = ingest(&manifest).unwrap();

    // The unlabeled support entry is skipped, not rejected.
    assert_eq!(accounts.len(), 2);
    assert_eq!(report.rows_rejected, 0);
    assert_eq!(report.per_class_counts["0"], 1);
    assert_eq!(report.per_class_counts["1"], 1);

    let carol = accounts.iter().find(|a| a.id == "12345").unwrap();
    assert_eq!(carol.label, Label::Human);
    assert_eq!(carol.screen_name, "carol");
    assert_eq!(carol.followers_count, 42);
    assert_eq!(carol.profile_background_color.as_deref(), Some("C0DEED"));
    assert_eq!(carol.description, "hello there");

    // Text-only tweets: optional fields absent, type markers from prefixes.
    let carol_tweets = &tweets["12345"];
    assert_eq!(carol_tweets.len(), 3);
    assert!(carol_tweets.iter().all(|t| t.created_at.is_none()
        && t.source.is_none()
        && t.favorite_count.is_none()));
    assert!(carol_tweets[0].is_retweet);
    assert!(carol_tweets[1].is_reply);
    assert!(!carol_tweets[2].is_retweet && !carol_tweets[2].is_reply);

    // The bot entry has a null tweet list and the "None" description maps to
    // an empty string.
    let promo = accounts.iter().find(|a| a.id == "67890").unwrap();
    assert_eq!(promo.description, "");
    assert!(!tweets.contains_key("67890"));
}
