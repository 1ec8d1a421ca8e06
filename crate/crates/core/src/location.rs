//! The 10-byte plaintext carried inside a location report.
//!
//! ```text
//! lat (i32 BE, deg * 1e7) || lon (i32 BE, deg * 1e7) || accuracy (m) || status
//! ```

use thiserror::Error;

pub const LOCATION_LEN: usize = 10;
const SCALE: f64 = 1e7;

#[derive(Debug, Error, PartialEq)]
pub enum LocationError {
    #[error("latitude {0} outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    Longitude(f64),
    #[error("location plaintext must be {LOCATION_LEN} bytes, got {0}")]
    Length(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationMessage {
    pub latitude: f64,
    pub longitude: f64,
    /// Horizontal accuracy in meters.
    pub accuracy: u8,
    pub status: u8,
}

impl LocationMessage {
    pub fn new(latitude: f64, longitude: f64, accuracy: u8, status: u8) -> Result<Self, LocationError> {
        let msg = Self { latitude, longitude, accuracy, status };
        msg.validate()?;
        Ok(msg)
    }

    pub fn validate(&self) -> Result<(), LocationError> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(LocationError::Latitude(self.latitude));
        }
        if !(-180.0..=180.0).contains(&self.longitude) {
            return Err(LocationError::Longitude(self.longitude));
        }
        Ok(())
    }

    /// Snaps both coordinates onto the 1e-7 degree grid used on the wire.
    pub fn quantized(&self) -> Self {
        Self {
            latitude: fixed(self.latitude) as f64 / SCALE,
            longitude: fixed(self.longitude) as f64 / SCALE,
            ..*self
        }
    }
}

fn fixed(deg: f64) -> i32 {
    // |deg| <= 180 so deg * 1e7 <= 1.8e9 fits in i32
    (deg * SCALE).round() as i32
}

pub fn encode_location(msg: &LocationMessage) -> Result<[u8; LOCATION_LEN], LocationError> {
    msg.validate()?;
    let mut out = [0u8; LOCATION_LEN];
    out[0..4].copy_from_slice(&fixed(msg.latitude).to_be_bytes());
    out[4..8].copy_from_slice(&fixed(msg.longitude).to_be_bytes());
    out[8] = msg.accuracy;
    out[9] = msg.status;
    Ok(out)
}

pub fn decode_location(bytes: &[u8]) -> Result<LocationMessage, LocationError> {
    let bytes: &[u8; LOCATION_LEN] = bytes.try_into().map_err(|_| LocationError::Length(bytes.len()))?;
    let lat = i32::from_be_bytes(bytes[0..4].try_into().unwrap());
    let lon = i32::from_be_bytes(bytes[4..8].try_into().unwrap());
    Ok(LocationMessage {
        latitude: lat as f64 / SCALE,
        longitude: lon as f64 / SCALE,
        accuracy: bytes[8],
        status: bytes[9],
    })
}
