//! Canonical record cache: a versioned, length-prefixed binary container
//! with a JSON header, so large corpora parse once and reload fast.
//!
//! Layout: 8-byte magic `BMCANON1`, u32-LE header length, JSON header
//! (`{"version":"v1","accounts":N,"tweet_groups":M}`), then N length-prefixed
//! account records and M length-prefixed tweet groups, each a JSON document.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{AccountRecord, TweetRecord};

use super::TweetMap;

const MAGIC: &[u8; 8] = b"BMCANON1";
const VERSION: &str = "v1";

#[derive(Serialize, Deserialize)]
struct Header {
    version: String,
    accounts: usize,
    tweet_groups: usize,
}

#[derive(Serialize, Deserialize)]
struct TweetGroup {
    account_id: String,
    tweets: Vec<TweetRecord>,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::io(path.display().to_string(), e)
}

fn write_chunk<W: Write>(w: &mut W, payload: &[u8]) -> std::io::Result<()> {
    w.write_all(&(payload.len() as u32).to_le_bytes())?;
    w.write_all(payload)
}

fn read_chunk<R: Read>(r: &mut R) -> std::io::Result<Vec<u8>> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut payload = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut payload)?;
    Ok(payload)
}

pub fn write_canonical(
    accounts: &[AccountRecord],
    tweets: &TweetMap,
    path: &Path,
) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let header = serde_json::to_vec(&Header {
        version: VERSION.to_string(),
        accounts: accounts.len(),
        tweet_groups: tweets.len(),
    })
    .expect("header serializes");

    let run = (|| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        write_chunk(&mut w, &header)?;
        for a in accounts {
            write_chunk(&mut w, &serde_json::to_vec(a).expect("record serializes"))?;
        }
        for (account_id, group) in tweets {
            let payload = serde_json::to_vec(&TweetGroup {
                account_id: account_id.clone(),
                tweets: group.clone(),
            })
            .expect("group serializes");
            write_chunk(&mut w, &payload)?;
        }
        w.flush()
    })();
    run.map_err(|e| io_err(path, e))
}

pub fn read_canonical(path: &Path) -> Result<(Vec<AccountRecord>, TweetMap)> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|e| io_err(path, e))?;
    if &magic != MAGIC {
        return Err(Error::SchemaMismatch {
            expected: format!("magic {}", String::from_utf8_lossy(MAGIC)),
            found: format!("magic {}", String::from_utf8_lossy(&magic)),
        });
    }
    let header: Header = serde_json::from_slice(&read_chunk(&mut r).map_err(|e| io_err(path, e))?)
        .map_err(|e| Error::SchemaMismatch {
            expected: "canonical cache header".into(),
            found: e.to_string(),
        })?;
    if header.version != VERSION {
        return Err(Error::SchemaMismatch {
            expected: VERSION.to_string(),
            found: header.version,
        });
    }

    let mut accounts = Vec::with_capacity(header.accounts);
    for _ in 0..header.accounts {
        let chunk = read_chunk(&mut r).map_err(|e| io_err(path, e))?;
        accounts.push(serde_json::from_slice(&chunk).map_err(|e| Error::SchemaMismatch {
            expected: "account record".into(),
            found: e.to_string(),
        })?);
    }
    let mut tweets: TweetMap = BTreeMap::new();
    for _ in 0..header.tweet_groups {
        let chunk = read_chunk(&mut r).map_err(|e| io_err(path, e))?;
        let group: TweetGroup =
            serde_json::from_slice(&chunk).map_err(|e| Error::SchemaMismatch {
                expected: "tweet group".into(),
                found: e.to_string(),
            })?;
        tweets.insert(group.account_id, group.tweets);
    }
    Ok((accounts, tweets))
}
