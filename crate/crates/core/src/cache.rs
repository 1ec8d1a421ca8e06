//! On-disk key caches and master key files.
//!
//! A key cache is UTF-8 JSON-lines, one record per advertisement key:
//! `{"index":1,"d":"<b64 28B>","x":"<b64 28B>","key_id":"<b64 32B>"}`.
//! Files are written to a temporary sibling and renamed into place.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use base64::{engine::general_purpose::STANDARD as BASE64, Engine as _};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keys::{AdvertisementKeyPair, KeyError, MasterBeaconKey, SCALAR_LEN};

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("refusing to write an empty key cache")]
    Empty,
    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: field `{field}` is not valid base64")]
    Base64 { line: usize, field: &'static str },
    #[error("line {line}: field `{field}` has {actual} bytes, expected {expected}")]
    Length { line: usize, field: &'static str, expected: usize, actual: usize },
    #[error("line {line}: field `{field}` does not match the private key")]
    Inconsistent { line: usize, field: &'static str },
    #[error("invalid master key file: {0}")]
    Master(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CacheError {
    /// Line number for record-level errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            CacheError::Malformed { line, .. }
            | CacheError::Base64 { line, .. }
            | CacheError::Length { line, .. }
            | CacheError::Inconsistent { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    index: u32,
    d: String,
    x: String,
    key_id: String,
}

pub fn write_cache<W: Write>(keys: &[AdvertisementKeyPair], mut out: W) -> Result<(), CacheError> {
    if keys.is_empty() {
        return Err(CacheError::Empty);
    }
    for k in keys {
        let rec = CacheRecord {
            index: k.index(),
            d: BASE64.encode(k.d_bytes()),
            x: BASE64.encode(k.x_bytes()),
            key_id: BASE64.encode(k.key_id().0),
        };
        serde_json::to_writer(&mut out, &rec).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn field<const N: usize>(line: usize, field: &'static str, value: &str) -> Result<[u8; N], CacheError> {
    let raw = BASE64.decode(value).map_err(|_| CacheError::Base64 { line, field })?;
    let actual = raw.len();
    raw.try_into().map_err(|_| CacheError::Length { line, field, expected: N, actual })
}

pub fn read_cache<R: BufRead>(input: R) -> Result<Vec<AdvertisementKeyPair>, CacheError> {
    let mut keys = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CacheRecord = serde_json::from_str(&line)
            .map_err(|e| CacheError::Malformed { line: line_no, reason: e.to_string() })?;
        let d = field::<SCALAR_LEN>(line_no, "d", &rec.d)?;
        let x = field::<SCALAR_LEN>(line_no, "x", &rec.x)?;
        let key_id = field::<32>(line_no, "key_id", &rec.key_id)?;
        let key = AdvertisementKeyPair::from_private(rec.index, &d).map_err(|e| match e {
            KeyError::InvalidScalar => CacheError::Inconsistent { line: line_no, field: "d" },
            other => CacheError::Malformed { line: line_no, reason: other.to_string() },
        })?;
        if key.x_bytes() != &x {
            return Err(CacheError::Inconsistent { line: line_no, field: "x" });
        }
        if key.key_id().0 != key_id {
            return Err(CacheError::Inconsistent { line: line_no, field: "key_id" });
        }
        keys.push(key);
    }
    Ok(keys)
}

fn write_atomically(dest: &Path, body: impl FnOnce(&mut fs::File) -> Result<(), CacheError>) -> Result<(), CacheError> {
    let mut tmp_name = dest.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    tmp_name.push(".tmp");
    let tmp = dest.with_file_name(tmp_name);
    let mut file = fs::File::create(&tmp)?;
    body(&mut file)?;
    file.sync_all()?;
    fs::rename(&tmp, dest)?;
    Ok(())
}

pub fn export_cache(keys: &[AdvertisementKeyPair], dest: &Path) -> Result<(), CacheError> {
    if keys.is_empty() {
        return Err(CacheError::Empty);
    }
    write_atomically(dest, |f| write_cache(keys, std::io::BufWriter::new(f)))
}

pub fn import_cache(src: &Path) -> Result<Vec<AdvertisementKeyPair>, CacheError> {
    read_cache(BufReader::new(fs::File::open(src)?))
}

#[derive(Serialize, Deserialize)]
struct MasterFile {
    d0: String,
    sk0: String,
    creation_time: DateTime<Utc>,
}

pub fn master_to_json(master: &MasterBeaconKey) -> String {
    serde_json::to_string_pretty(&MasterFile {
        d0: BASE64.encode(master.d0_bytes()),
        sk0: BASE64.encode(master.sk0()),
        creation_time: master.creation_time(),
    })
    .expect("serializable")
}

pub fn master_from_json(text: &str) -> Result<MasterBeaconKey, CacheError> {
    let f: MasterFile = serde_json::from_str(text).map_err(|e| CacheError::Master(e.to_string()))?;
    let decode = |v: &str| BASE64.decode(v).map_err(|e| CacheError::Master(e.to_string()));
    let d0: [u8; SCALAR_LEN] =
        decode(&f.d0)?.try_into().map_err(|_| CacheError::Master("d0 must be 28 bytes".into()))?;
    let sk0: [u8; 32] =
        decode(&f.sk0)?.try_into().map_err(|_| CacheError::Master("sk0 must be 32 bytes".into()))?;
    MasterBeaconKey::from_parts(&d0, sk0, f.creation_time).map_err(|e| CacheError::Master(e.to_string()))
}

pub fn save_master(master: &MasterBeaconKey, dest: &Path) -> Result<(), CacheError> {
    write_atomically(dest, |f| Ok(f.write_all(master_to_json(master).as_bytes())?))
}

pub fn load_master(src: &Path) -> Result<MasterBeaconKey, CacheError> {
    master_from_json(&fs::read_to_string(src)?)
}
