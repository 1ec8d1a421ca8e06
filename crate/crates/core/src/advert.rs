//! The 37-byte offline-finding BLE advertisement.
//!
//! ```text
//! 0..=5   random address: (x[0] | 0b11 << 6) || x[1..6]
//! 6       payload length (30)
//! 7       AD type 0xFF (manufacturer specific)
//! 8..=9   company id 0x004C, little-endian
//! 10      offline-finding type 0x12
//! 11      offline-finding data length (25)
//! 12      status
//! 13..=34 x[6..28]
//! 35      x[0] >> 6
//! 36      hint
//! ```

use std::fmt;

use thiserror::Error;

use crate::keys::SCALAR_LEN;

pub const FRAME_LEN: usize = 37;
pub const ADDRESS_LEN: usize = 6;
pub const PAYLOAD_LEN: usize = 31;

pub const PAYLOAD_LENGTH_BYTE: u8 = 30;
pub const AD_TYPE_MANUFACTURER: u8 = 0xFF;
pub const COMPANY_ID: u16 = 0x004C;
pub const OF_TYPE: u8 = 0x12;
pub const OF_DATA_LENGTH: u8 = 25;

const RANDOM_ADDRESS_BITS: u8 = 0b1100_0000;

/// Header field that disqualified a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameField {
    AddressType,
    PayloadLength,
    AdType,
    CompanyId,
    OfType,
    OfDataLength,
    KeyBits,
}

impl fmt::Display for FrameField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameField::AddressType => "address type",
            FrameField::PayloadLength => "payload length",
            FrameField::AdType => "advertisement type",
            FrameField::CompanyId => "company id",
            FrameField::OfType => "type",
            FrameField::OfDataLength => "data length",
            FrameField::KeyBits => "key bits",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AdvertError {
    #[error("public key must be {SCALAR_LEN} bytes, got {0}")]
    WrongKeyLength(usize),
    #[error("frame must be {FRAME_LEN} bytes, got {0}")]
    FrameLength(usize),
    #[error("not an offline-finding advertisement: bad {0}")]
    NotOfflineFinding(FrameField),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdvertPayloadFields {
    pub status: u8,
    pub hint: u8,
    pub x_bytes: [u8; SCALAR_LEN],
}

impl AdvertPayloadFields {
    /// Fields for `x` with zero status and the default hint 0x00.
    pub fn new(x_bytes: [u8; SCALAR_LEN]) -> Self {
        Self { status: 0, hint: 0, x_bytes }
    }

    pub fn from_slice(x: &[u8], status: u8, hint: u8) -> Result<Self, AdvertError> {
        let x_bytes = x.try_into().map_err(|_| AdvertError::WrongKeyLength(x.len()))?;
        Ok(Self { status, hint, x_bytes })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BleFrame {
    pub address: [u8; ADDRESS_LEN],
    pub payload: [u8; PAYLOAD_LEN],
}

impl BleFrame {
    pub fn to_bytes(&self) -> [u8; FRAME_LEN] {
        let mut out = [0u8; FRAME_LEN];
        out[..ADDRESS_LEN].copy_from_slice(&self.address);
        out[ADDRESS_LEN..].copy_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AdvertError> {
        if bytes.len() != FRAME_LEN {
            return Err(AdvertError::FrameLength(bytes.len()));
        }
        let mut frame = BleFrame { address: [0; ADDRESS_LEN], payload: [0; PAYLOAD_LEN] };
        frame.address.copy_from_slice(&bytes[..ADDRESS_LEN]);
        frame.payload.copy_from_slice(&bytes[ADDRESS_LEN..]);
        Ok(frame)
    }

    /// Lowercase hex, address first, space separated.
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect::<Vec<_>>().join(" ")
    }

    /// Byte at its zero-indexed position in the 37-byte frame.
    fn at(&self, i: usize) -> u8 {
        if i < ADDRESS_LEN {
            self.address[i]
        } else {
            self.payload[i - ADDRESS_LEN]
        }
    }
}

impl fmt::Debug for BleFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BleFrame[{}]", self.to_hex())
    }
}

pub fn encode_advert(fields: &AdvertPayloadFields) -> BleFrame {
    let x = &fields.x_bytes;
    let mut address = [0u8; ADDRESS_LEN];
    address.copy_from_slice(&x[..ADDRESS_LEN]);
    address[0] |= RANDOM_ADDRESS_BITS;

    let mut payload = [0u8; PAYLOAD_LEN];
    let [lo, hi] = COMPANY_ID.to_le_bytes();
    payload[..7].copy_from_slice(&[PAYLOAD_LENGTH_BYTE, AD_TYPE_MANUFACTURER, lo, hi, OF_TYPE, OF_DATA_LENGTH, fields.status]);
    payload[7..29].copy_from_slice(&x[6..]);
    payload[29] = x[0] >> 6;
    payload[30] = fields.hint;
    BleFrame { address, payload }
}

pub fn decode_advert(frame: &BleFrame) -> Result<AdvertPayloadFields, AdvertError> {
    let reject = |field| Err(AdvertError::NotOfflineFinding(field));
    if frame.address[0] & RANDOM_ADDRESS_BITS != RANDOM_ADDRESS_BITS {
        return reject(FrameField::AddressType);
    }
    if frame.at(6) != PAYLOAD_LENGTH_BYTE {
        return reject(FrameField::PayloadLength);
    }
    if frame.at(7) != AD_TYPE_MANUFACTURER {
        return reject(FrameField::AdType);
    }
    if u16::from_le_bytes([frame.at(8), frame.at(9)]) != COMPANY_ID {
        return reject(FrameField::CompanyId);
    }
    if frame.at(10) != OF_TYPE {
        return reject(FrameField::OfType);
    }
    if frame.at(11) != OF_DATA_LENGTH {
        return reject(FrameField::OfDataLength);
    }
    if frame.at(35) > 0b11 {
        return reject(FrameField::KeyBits);
    }

    let mut x = [0u8; SCALAR_LEN];
    x[..ADDRESS_LEN].copy_from_slice(&frame.address);
    x[0] = (frame.at(35) << 6) | (frame.address[0] & !RANDOM_ADDRESS_BITS);
    x[6..].copy_from_slice(&frame.payload[7..29]);
    Ok(AdvertPayloadFields { status: frame.at(12), hint: frame.at(36), x_bytes: x })
}

pub fn is_offline_finding(frame: &BleFrame) -> bool {
    decode_advert(frame).is_ok()
}
