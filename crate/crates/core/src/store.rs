//! In-memory report server state: submit, fetch, retention and the
//! metadata correlation analysis.
//!
//! The store only ever sees key ids, opaque payload bytes, receive times
//! and the tokens attached to requests. Correlation reads the cleartext
//! report timestamp in payload bytes 0..4 and nothing else.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::sync::RwLock;

use base64::{engine::general_purpose::STANDARD as BASE64, Engine as _};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keys::KeyId;
use crate::report::REPORT_LEN;
use crate::wire::{FetchRequest, FetchResponse, FetchResult, SubmitBatch, SubmitError};

pub const DAY_MS: i64 = 24 * 3600 * 1000;
pub const RETENTION_MS: i64 = 7 * DAY_MS;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreConfig {
    pub retention_ms: i64,
    /// When false, fetches leave no owner trace behind.
    pub record_owner_tokens: bool,
}

impl Default for StoreConfig {
    fn default() -> Self {
        Self { retention_ms: RETENTION_MS, record_owner_tokens: true }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct StoredReport {
    pub key_id: KeyId,
    pub payload: [u8; REPORT_LEN],
    /// Server receive time, Unix milliseconds.
    pub date_published: i64,
    pub finder_id: String,
    pub status_code: i32,
}

impl std::fmt::Debug for StoredReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StoredReport")
            .field("key_id", &self.key_id)
            .field("date_published", &self.date_published)
            .field("finder_id", &self.finder_id)
            .finish_non_exhaustive()
    }
}

impl StoredReport {
    /// Report creation time from the unencrypted header, seconds since 2001.
    pub fn report_timestamp(&self) -> u32 {
        u32::from_be_bytes(self.payload[..4].try_into().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchRecord {
    pub owner_token: String,
    pub key_id: KeyId,
    pub at_ms: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationFinding {
    pub owner_a: String,
    pub owner_b: String,
    pub finder_id: String,
    /// Seconds between the two reports.
    pub time_gap: u32,
    /// Earlier of the two report timestamps, seconds since 2001.
    pub time: u32,
    #[serde(serialize_with = "ser_key_id", deserialize_with = "de_key_id")]
    pub key_id_a: KeyId,
    #[serde(serialize_with = "ser_key_id", deserialize_with = "de_key_id")]
    pub key_id_b: KeyId,
}

fn ser_key_id<S: serde::Serializer>(k: &KeyId, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&k.to_base64())
}

fn de_key_id<'de, D: serde::Deserializer<'de>>(d: D) -> Result<KeyId, D::Error> {
    let s = String::deserialize(d)?;
    KeyId::from_base64(&s).ok_or_else(|| serde::de::Error::custom("key id is not base64 of 32 bytes"))
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SnapshotRecord {
    id: String,
    payload: String,
    date_published: i64,
    finder_id: String,
    status_code: i32,
}

#[derive(Default)]
struct Inner {
    next_seq: u64,
    by_key: HashMap<KeyId, Vec<(u64, StoredReport)>>,
    fetches: Vec<FetchRecord>,
}

impl Inner {
    fn insert(&mut self, report: StoredReport) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.by_key.entry(report.key_id).or_default().push((seq, report));
    }

    fn ordered(&self) -> Vec<&(u64, StoredReport)> {
        let mut all: Vec<_> = self.by_key.values().flatten().collect();
        all.sort_by_key(|(seq, _)| *seq);
        all
    }
}

#[derive(Default)]
pub struct ReportStore {
    config: StoreConfig,
    inner: RwLock<Inner>,
}

impl ReportStore {
    pub fn new(config: StoreConfig) -> Self {
        Self { config, inner: RwLock::default() }
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    /// Stores every entry of a well-formed batch, or nothing at all.
    pub fn submit(&self, body: &[u8], finder_id: &str, now_ms: i64) -> Result<usize, SubmitError> {
        let batch = SubmitBatch::decode(body)?;
        let n = batch.entries.len();
        let mut inner = self.inner.write().unwrap();
        for e in batch.entries {
            inner.insert(StoredReport {
                key_id: e.key_id,
                payload: e.report,
                date_published: now_ms,
                finder_id: finder_id.to_owned(),
                status_code: 0,
            });
        }
        Ok(n)
    }

    /// Inserts a report as-is, bypassing the submit body.
    pub fn insert_raw(&self, report: StoredReport) {
        self.inner.write().unwrap().insert(report);
    }

    /// Union of all search windows, each filtered by id and
    /// `startDate <= datePublished <= endDate`, minus anything past retention.
    pub fn fetch(&self, req: &FetchRequest, owner_token: Option<&str>, now_ms: i64) -> FetchResponse {
        let oldest = now_ms - self.config.retention_ms;
        let mut hits: BTreeMap<(i64, u64), FetchResult> = BTreeMap::new();
        let mut requested = BTreeSet::new();
        {
            let inner = self.inner.read().unwrap();
            for window in &req.search {
                for id in window.ids.iter().filter_map(|s| KeyId::from_base64(s)) {
                    requested.insert(id);
                    let Some(reports) = inner.by_key.get(&id) else { continue };
                    for (seq, r) in reports {
                        let dp = r.date_published;
                        if dp >= oldest && window.start_date <= dp && dp <= window.end_date {
                            hits.entry((dp, *seq)).or_insert_with(|| FetchResult::found(dp, &r.key_id, &r.payload));
                        }
                    }
                }
            }
        }
        if let (Some(owner), true) = (owner_token, self.config.record_owner_tokens) {
            let mut inner = self.inner.write().unwrap();
            inner.fetches.extend(requested.into_iter().map(|key_id| FetchRecord {
                owner_token: owner.to_owned(),
                key_id,
                at_ms: now_ms,
            }));
        }
        FetchResponse::ok(hits.into_values().collect())
    }

    /// Drops reports published before `now - retention`.
    pub fn purge_expired(&self, now_ms: i64) -> usize {
        let oldest = now_ms - self.config.retention_ms;
        let mut inner = self.inner.write().unwrap();
        let mut removed = 0;
        inner.by_key.retain(|_, reports| {
            let before = reports.len();
            reports.retain(|(_, r)| r.date_published >= oldest);
            removed += before - reports.len();
            !reports.is_empty()
        });
        removed
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().by_key.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All reports in insertion order.
    pub fn reports(&self) -> Vec<StoredReport> {
        self.inner.read().unwrap().ordered().into_iter().map(|(_, r)| r.clone()).collect()
    }

    pub fn fetch_log(&self) -> Vec<FetchRecord> {
        self.inner.read().unwrap().fetches.clone()
    }

    /// Owner pairs whose devices were reported by the same finder within
    /// `window_secs` of each other and whose owners later fetched those keys.
    /// One finding per (finder, owner pair), keeping the closest report pair.
    pub fn correlate(&self, window_secs: u32) -> Vec<CorrelationFinding> {
        let inner = self.inner.read().unwrap();

        // owners per key with the time of each fetch
        let mut fetched_by: HashMap<KeyId, Vec<(&str, i64)>> = HashMap::new();
        for f in &inner.fetches {
            fetched_by.entry(f.key_id).or_default().push((&f.owner_token, f.at_ms));
        }
        let owners_after = |r: &StoredReport| -> BTreeSet<&str> {
            fetched_by
                .get(&r.key_id)
                .map(|v| v.iter().filter(|(_, at)| *at >= r.date_published).map(|(o, _)| *o).collect())
                .unwrap_or_default()
        };

        let mut per_finder: BTreeMap<&str, Vec<&StoredReport>> = BTreeMap::new();
        for (_, r) in inner.ordered() {
            per_finder.entry(&r.finder_id).or_default().push(r);
        }

        let mut best: BTreeMap<(&str, &str, &str), CorrelationFinding> = BTreeMap::new();
        for (finder, mut reports) in per_finder {
            reports.sort_by_key(|r| r.report_timestamp());
            let owners: Vec<BTreeSet<&str>> = reports.iter().map(|r| owners_after(r)).collect();
            for i in 0..reports.len() {
                if owners[i].is_empty() {
                    continue;
                }
                let ti = reports[i].report_timestamp();
                for j in i + 1..reports.len() {
                    let gap = reports[j].report_timestamp() - ti;
                    if gap > window_secs {
                        break;
                    }
                    if reports[i].key_id == reports[j].key_id {
                        continue;
                    }
                    for &oi in &owners[i] {
                        for &oj in &owners[j] {
                            if oi == oj {
                                continue;
                            }
                            let (a, b, ka, kb) = if oi < oj {
                                (oi, oj, reports[i].key_id, reports[j].key_id)
                            } else {
                                (oj, oi, reports[j].key_id, reports[i].key_id)
                            };
                            let candidate = CorrelationFinding {
                                owner_a: a.to_owned(),
                                owner_b: b.to_owned(),
                                finder_id: finder.to_owned(),
                                time_gap: gap,
                                time: ti,
                                key_id_a: ka,
                                key_id_b: kb,
                            };
                            best.entry((finder, a, b))
                                .and_modify(|cur| {
                                    if (gap, ti) < (cur.time_gap, cur.time) {
                                        *cur = candidate.clone();
                                    }
                                })
                                .or_insert(candidate);
                        }
                    }
                }
            }
        }
        let mut out: Vec<_> = best.into_values().collect();
        out.sort_by(|x, y| {
            (&x.finder_id, x.time, &x.owner_a, &x.owner_b).cmp(&(&y.finder_id, y.time, &y.owner_a, &y.owner_b))
        });
        out
    }

    /// JSON-lines dump of every stored report in insertion order.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in self.reports() {
            let rec = SnapshotRecord {
                id: r.key_id.to_base64(),
                payload: BASE64.encode(r.payload),
                date_published: r.date_published,
                finder_id: r.finder_id,
                status_code: r.status_code,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    /// Appends the reports of a snapshot, returning how many were read.
    pub fn load_snapshot<R: BufRead>(&self, input: R) -> Result<usize, SnapshotError> {
        let mut parsed = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |reason: String| SnapshotError::Parse { line: i + 1, reason };
            let rec: SnapshotRecord = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
            let key_id = KeyId::from_base64(&rec.id).ok_or_else(|| err("bad id".into()))?;
            let payload = BASE64
                .decode(&rec.payload)
                .ok()
                .and_then(|p| <[u8; REPORT_LEN]>::try_from(p).ok())
                .ok_or_else(|| err("payload is not 88 bytes of base64".into()))?;
            parsed.push(StoredReport {
                key_id,
                payload,
                date_published: rec.date_published,
                finder_id: rec.finder_id,
                status_code: rec.status_code,
            });
        }
        let n = parsed.len();
        let mut inner = self.inner.write().unwrap();
        parsed.into_iter().for_each(|r| inner.insert(r));
        Ok(n)
    }
}
