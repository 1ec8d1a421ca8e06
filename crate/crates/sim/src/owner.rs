//! The owner side: derive the keys for a time span, fetch, decrypt.

use std::collections::HashMap;

use chrono::{DateTime, Utc};
use findnet_core::endpoint::ReportEndpoint;
use findnet_core::keys::{keys_in_window, AdvertisementKeyPair, KeyId};
use findnet_core::report::{decode_report, decrypt_report};
use findnet_core::store::RETENTION_MS;
use findnet_core::wire::{FetchRequest, FetchResponse};
use findnet_core::{LocationMessage, MasterBeaconKey};

use crate::engine::SimError;

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievedReport {
    /// Timestamp inside the report, set by the finder.
    pub time: DateTime<Utc>,
    pub published_ms: i64,
    pub key_index: u32,
    pub key_id: KeyId,
    pub message: LocationMessage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub key_id: Option<KeyId>,
    pub published_ms: i64,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Retrieval {
    /// Chronological.
    pub reports: Vec<RetrievedReport>,
    pub skipped: Vec<Skipped>,
    pub keys_requested: usize,
}

/// Fetches and decrypts everything published for the keys advertised in
/// `[t_start, t_end]`. Reports that fail to decode or authenticate land
/// in `skipped`.
///
/// The publication window extends one retention period past `t_end`, since
/// finders upload with a delay.
pub fn owner_retrieve(
    master: &MasterBeaconKey,
    t_start: DateTime<Utc>,
    t_end: DateTime<Utc>,
    endpoint: &dyn ReportEndpoint,
    owner_token: Option<&str>,
) -> Result<Retrieval, SimError> {
    let keys = keys_in_window(master, t_start, t_end)?;
    retrieve_with_keys(&keys, t_start.timestamp_millis(), t_end.timestamp_millis() + RETENTION_MS, endpoint, owner_token)
}

/// Fetches reports for `keys` published in `[from_ms, to_ms]` and decrypts them.
pub fn retrieve_with_keys(
    keys: &[AdvertisementKeyPair],
    from_ms: i64,
    to_ms: i64,
    endpoint: &dyn ReportEndpoint,
    owner_token: Option<&str>,
) -> Result<Retrieval, SimError> {
    let req = FetchRequest::single(from_ms, to_ms, keys.iter().map(|k| k.key_id()));
    let resp = endpoint.fetch(&req, owner_token)?;
    Ok(decrypt_response(keys, &resp))
}

/// Decrypts each result with the key whose id it carries.
pub fn decrypt_response(keys: &[AdvertisementKeyPair], resp: &FetchResponse) -> Retrieval {
    let by_id: HashMap<KeyId, &AdvertisementKeyPair> = keys.iter().map(|k| (k.key_id(), k)).collect();
    let mut out = Retrieval { keys_requested: keys.len(), ..Retrieval::default() };
    for r in &resp.results {
        let skip = |key_id, reason: &str| Skipped { key_id, published_ms: r.date_published, reason: reason.to_owned() };
        let key_id = r.key_id();
        let Some(pair) = key_id.and_then(|id| by_id.get(&id)) else {
            out.skipped.push(skip(key_id, "unrequested key id"));
            continue;
        };
        let Some(report) = r.payload_bytes().and_then(|b| decode_report(&b).ok()) else {
            out.skipped.push(skip(key_id, "malformed payload"));
            continue;
        };
        match decrypt_report(pair.secret(), &report) {
            Ok(message) => out.reports.push(RetrievedReport {
                time: report.time(),
                published_ms: r.date_published,
                key_index: pair.index(),
                key_id: pair.key_id(),
                message,
            }),
            Err(e) => out.skipped.push(skip(key_id, &e.to_string())),
        }
    }
    out.reports.sort_by(|a, b| (a.time, a.published_ms, a.key_index).cmp(&(b.time, b.published_ms, b.key_index)));
    out
}

impl RetrievedReport {
    pub fn point(&self) -> findnet_geo::GeoPoint {
        findnet_geo::GeoPoint::new(self.message.latitude, self.message.longitude, self.time)
    }
}
