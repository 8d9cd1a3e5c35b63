//! Shared fixtures for the criterion benchmarks.

use std::collections::BTreeMap;

use chrono::{TimeZone, Utc};

use botminer_core::ingest::{default_platform_colors, generate_synthetic, SyntheticSpec, TweetMap};
use botminer_core::matrix::Matrix;
use botminer_core::rng::unit_rng;
use botminer_core::types::{AccountRecord, Label};
use rand::Rng;

/// Synthetic corpus sized for benchmarking the extraction hot path.
pub fn corpus(accounts_per_class: usize, tweets_per_account: usize) -> (Vec<AccountRecord>, TweetMap) {
    let spec = SyntheticSpec {
        seed: 99,
        humans: accounts_per_class,
        bots: accounts_per_class,
        tweets_per_account,
        account_signal: true,
        content_signal: true,
    };
    let crawl = Utc.with_ymd_and_hms(2020, 6, 1, 0, 0, 0).unwrap();
    generate_synthetic(&spec, crawl)
}

pub fn platform_defaults() -> BTreeMap<String, String> {
    default_platform_colors()
}

/// Dense numeric problem for the training benchmarks.
pub fn numeric_problem(rows: usize, cols: usize) -> (Matrix, Vec<Label>) {
    let mut rng = unit_rng(7, "bench", 0);
    let mut data = Vec::with_capacity(rows);
    let mut labels = Vec::with_capacity(rows);
    for i in 0..rows {
        let label = i % 2 == 0;
        let shift = if label { 0.4 } else { -0.4 };
        data.push(
            (0..cols)
                .map(|c| rng.gen_range(-1.0..1.0) + if c < 3 { shift } else { 0.0 })
                .collect(),
        );
        labels.push(if label { Label::Bot } else { Label::Human });
    }
    (Matrix::from_rows(data), labels)
}
