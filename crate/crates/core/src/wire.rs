//! Request and response bodies of the submit and fetch endpoints.
//!
//! Submit is binary:
//!
//! ```text
//! 0F 8A E0 || count (1 byte) || count * (key id (32) || report (88))
//! ```
//!
//! Fetch is JSON, with `search` windows in the request and `results` in
//! the response.

use base64::{engine::general_purpose::STANDARD as BASE64, Engine as _};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keys::KeyId;
use crate::report::REPORT_LEN;

pub const SUBMIT_HEADER: [u8; 3] = [0x0F, 0x8A, 0xE0];
pub const SUBMIT_ENTRY_LEN: usize = 32 + REPORT_LEN;
pub const MAX_BATCH: usize = 255;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubmitError {
    #[error("submit body does not start with 0F8AE0")]
    BadHeader,
    #[error("submit body is {actual} bytes, header announces {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("a batch holds at most {MAX_BATCH} reports, got {0}")]
    TooManyEntries(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmitEntry {
    pub key_id: KeyId,
    pub report: [u8; REPORT_LEN],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubmitBatch {
    pub entries: Vec<SubmitEntry>,
}

impl SubmitBatch {
    pub fn body_len(count: usize) -> usize {
        SUBMIT_HEADER.len() + 1 + count * SUBMIT_ENTRY_LEN
    }

    pub fn encode(&self) -> Result<Vec<u8>, SubmitError> {
        let count = self.entries.len();
        if count > MAX_BATCH {
            return Err(SubmitError::TooManyEntries(count));
        }
        let mut out = Vec::with_capacity(Self::body_len(count));
        out.extend_from_slice(&SUBMIT_HEADER);
        out.push(count as u8);
        for e in &self.entries {
            out.extend_from_slice(&e.key_id.0);
            out.extend_from_slice(&e.report);
        }
        Ok(out)
    }

    pub fn decode(body: &[u8]) -> Result<Self, SubmitError> {
        if body.len() < 3 || body[..3] != SUBMIT_HEADER {
            return Err(SubmitError::BadHeader);
        }
        let Some(&count) = body.get(3) else {
            return Err(SubmitError::LengthMismatch { expected: Self::body_len(0), actual: body.len() });
        };
        let expected = Self::body_len(count as usize);
        if body.len() != expected {
            return Err(SubmitError::LengthMismatch { expected, actual: body.len() });
        }
        let entries = body[4..]
            .chunks_exact(SUBMIT_ENTRY_LEN)
            .map(|c| SubmitEntry {
                key_id: KeyId(c[..32].try_into().unwrap()),
                report: c[32..].try_into().unwrap(),
            })
            .collect();
        Ok(Self { entries })
    }

    /// Splits entries into bodies of at most 255 reports.
    pub fn chunked(entries: Vec<SubmitEntry>) -> Vec<SubmitBatch> {
        let mut out = Vec::new();
        let mut it = entries.into_iter().peekable();
        while it.peek().is_some() {
            out.push(SubmitBatch { entries: it.by_ref().take(MAX_BATCH).collect() });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchWindow {
    /// Unix milliseconds, inclusive.
    pub end_date: i64,
    /// Unix milliseconds, inclusive.
    pub start_date: i64,
    /// Base64 key ids.
    pub ids: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchRequest {
    pub search: Vec<SearchWindow>,
}

impl FetchRequest {
    pub fn single(start_ms: i64, end_ms: i64, ids: impl IntoIterator<Item = KeyId>) -> Self {
        Self {
            search: vec![SearchWindow {
                end_date: end_ms,
                start_date: start_ms,
                ids: ids.into_iter().map(|k| k.to_base64()).collect(),
            }],
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FetchError {
    #[error("malformed fetch request: {0}")]
    Malformed(String),
    #[error("search window {index} has startDate after endDate")]
    InvertedWindow { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FetchResult {
    pub date_published: i64,
    /// Base64 of the 88-byte report.
    pub payload: String,
    pub description: String,
    /// Base64 key id.
    pub id: String,
    pub status_code: i32,
}

impl FetchResult {
    pub fn found(date_published: i64, key_id: &KeyId, payload: &[u8]) -> Self {
        Self {
            date_published,
            payload: BASE64.encode(payload),
            description: "found".into(),
            id: key_id.to_base64(),
            status_code: 0,
        }
    }

    pub fn payload_bytes(&self) -> Option<Vec<u8>> {
        BASE64.decode(&self.payload).ok()
    }

    pub fn key_id(&self) -> Option<KeyId> {
        KeyId::from_base64(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FetchResponse {
    pub results: Vec<FetchResult>,
    pub status_code: String,
}

impl FetchResponse {
    pub fn ok(results: Vec<FetchResult>) -> Self {
        Self { results, status_code: "200".into() }
    }
}

/// Parses a fetch body and checks every window is ordered.
pub fn parse_fetch_request(body: &[u8]) -> Result<FetchRequest, FetchError> {
    let req: FetchRequest = serde_json::from_slice(body).map_err(|e| FetchError::Malformed(e.to_string()))?;
    req.validate()?;
    Ok(req)
}

impl FetchRequest {
    pub fn validate(&self) -> Result<(), FetchError> {
        match self.search.iter().position(|w| w.start_date > w.end_date) {
            Some(index) => Err(FetchError::InvertedWindow { index }),
            None => Ok(()),
        }
    }
}

/// Reply to a submit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmitReply {
    pub stored: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurgeReply {
    pub purged: usize,
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ServerStats {
    pub reports: usize,
    pub fetches: usize,
    pub record_owner_tokens: bool,
    pub now_ms: i64,
    pub manual_clock: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClockUpdate {
    pub now_ms: i64,
}
