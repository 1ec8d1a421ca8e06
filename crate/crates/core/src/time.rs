//! Report timestamps count seconds since 2001-01-01T00:00:00Z.

use chrono::{DateTime, TimeZone, Utc};

/// Unix time of 2001-01-01T00:00:00Z.
pub const APPLE_EPOCH_UNIX: i64 = 978_307_200;

/// Whole seconds since the 2001 epoch, or `None` outside the u32 range.
pub fn to_apple_seconds(t: DateTime<Utc>) -> Option<u32> {
    u32::try_from(t.timestamp() - APPLE_EPOCH_UNIX).ok()
}

pub fn from_apple_seconds(secs: u32) -> DateTime<Utc> {
    Utc.timestamp_opt(APPLE_EPOCH_UNIX + i64::from(secs), 0).unwrap()
}

pub fn from_unix_ms(ms: i64) -> DateTime<Utc> {
    Utc.timestamp_millis_opt(ms).single().expect("millisecond timestamp in range")
}
