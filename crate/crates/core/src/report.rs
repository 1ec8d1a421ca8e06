//! Finder-side ECIES encryption of location messages and the 88-byte report.
//!
//! ```text
//! timestamp (u32 BE, seconds since 2001-01-01) || confidence
//!   || ephemeral public key (0x04 || X || Y) || ciphertext (10) || tag (16)
//! ```
//!
//! The session key and IV come from X9.63-SHA256(ECDH X, advertised X, 32):
//! bytes 0..16 are the AES-128 key and 16..32 the 16-byte GCM nonce.

use aes_gcm::aead::consts::U16;
use aes_gcm::aead::{AeadInPlace, KeyInit};
use aes_gcm::aes::Aes128;
use aes_gcm::{AesGcm, Nonce, Tag};
use chrono::{DateTime, Utc};
use p224::ecdh::diffie_hellman;
use p224::elliptic_curve::point::DecompressPoint;
use p224::elliptic_curve::sec1::{FromEncodedPoint, ToEncodedPoint};
use p224::{AffinePoint, EncodedPoint, FieldBytes, NonZeroScalar, ProjectivePoint};
use rand_core::RngCore;
use thiserror::Error;

use crate::kdf::x963_sha256;
use crate::keys::{random_scalar, SCALAR_LEN};
use crate::location::{decode_location, encode_location, LocationError, LocationMessage, LOCATION_LEN};
use crate::time::{from_apple_seconds, to_apple_seconds};

pub const REPORT_LEN: usize = 88;
pub const EPHEMERAL_LEN: usize = 57;
pub const TAG_LEN: usize = 16;

type Aes128Gcm16 = AesGcm<Aes128, U16>;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("advertised key is not the X coordinate of a P-224 point")]
    OffCurveKey,
    #[error("entropy source failed: {0}")]
    Entropy(String),
    #[error("timestamp {0} cannot be expressed as seconds since 2001")]
    Timestamp(DateTime<Utc>),
    #[error("report must be {REPORT_LEN} bytes, got {0}")]
    Length(usize),
    #[error(transparent)]
    Location(#[from] LocationError),
    #[error("report authentication failed")]
    AuthenticationFailure,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncryptedReport {
    /// Seconds since 2001-01-01T00:00:00Z.
    pub timestamp: u32,
    pub confidence: u8,
    pub ephemeral: [u8; EPHEMERAL_LEN],
    pub ciphertext: [u8; LOCATION_LEN],
    pub tag: [u8; TAG_LEN],
}

impl std::fmt::Debug for EncryptedReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EncryptedReport")
            .field("timestamp", &self.timestamp)
            .field("confidence", &self.confidence)
            .finish_non_exhaustive()
    }
}

impl EncryptedReport {
    pub fn encode(&self) -> [u8; REPORT_LEN] {
        let mut out = [0u8; REPORT_LEN];
        out[0..4].copy_from_slice(&self.timestamp.to_be_bytes());
        out[4] = self.confidence;
        out[5..62].copy_from_slice(&self.ephemeral);
        out[62..72].copy_from_slice(&self.ciphertext);
        out[72..88].copy_from_slice(&self.tag);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, ReportError> {
        if bytes.len() != REPORT_LEN {
            return Err(ReportError::Length(bytes.len()));
        }
        Ok(Self {
            timestamp: u32::from_be_bytes(bytes[0..4].try_into().unwrap()),
            confidence: bytes[4],
            ephemeral: bytes[5..62].try_into().unwrap(),
            ciphertext: bytes[62..72].try_into().unwrap(),
            tag: bytes[72..88].try_into().unwrap(),
        })
    }

    pub fn time(&self) -> DateTime<Utc> {
        from_apple_seconds(self.timestamp)
    }
}

pub fn encode_report(report: &EncryptedReport) -> [u8; REPORT_LEN] {
    report.encode()
}

pub fn decode_report(bytes: &[u8]) -> Result<EncryptedReport, ReportError> {
    EncryptedReport::decode(bytes)
}

/// Lifts an advertised X coordinate to a curve point. The Y parity is
/// irrelevant: both candidates give the same ECDH X coordinate.
pub fn point_from_x(x: &[u8; SCALAR_LEN]) -> Option<AffinePoint> {
    AffinePoint::decompress(FieldBytes::from_slice(x), 0u8.into()).into()
}

fn cipher(shared_x: &[u8], advertised_x: &[u8; SCALAR_LEN]) -> (Aes128Gcm16, [u8; 16]) {
    let derived: [u8; 32] = x963_sha256(shared_x, advertised_x);
    let cipher = Aes128Gcm16::new_from_slice(&derived[..16]).expect("16-byte key");
    (cipher, derived[16..].try_into().unwrap())
}

/// Encrypts `msg` for the owner of `advertised_x`. Confidence is left at 0.
pub fn encrypt_report<R: RngCore + ?Sized>(
    advertised_x: &[u8; SCALAR_LEN],
    msg: &LocationMessage,
    timestamp: DateTime<Utc>,
    rng: &mut R,
) -> Result<EncryptedReport, ReportError> {
    let plaintext = encode_location(msg)?;
    let timestamp = to_apple_seconds(timestamp).ok_or(ReportError::Timestamp(timestamp))?;
    let advertised = point_from_x(advertised_x).ok_or(ReportError::OffCurveKey)?;
    let d_eph = random_scalar(rng).map_err(|e| ReportError::Entropy(e.to_string()))?;
    let p_eph = (ProjectivePoint::GENERATOR * *d_eph).to_affine();

    let shared = diffie_hellman(d_eph, advertised);
    let (cipher, iv) = cipher(shared.raw_secret_bytes(), advertised_x);
    let mut ciphertext = plaintext;
    let tag = cipher
        .encrypt_in_place_detached(Nonce::<U16>::from_slice(&iv), &[], &mut ciphertext)
        .expect("10-byte message is within GCM limits");

    let ephemeral: [u8; EPHEMERAL_LEN] = p_eph.to_encoded_point(false).as_bytes().try_into().unwrap();
    Ok(EncryptedReport { timestamp, confidence: 0, ephemeral, ciphertext, tag: tag.into() })
}

/// Decrypts with the advertisement private key d_i. Every failure past the
/// length check is reported as [`ReportError::AuthenticationFailure`].
pub fn decrypt_report(d: &NonZeroScalar, report: &EncryptedReport) -> Result<LocationMessage, ReportError> {
    let encoded = EncodedPoint::from_bytes(report.ephemeral).map_err(|_| ReportError::AuthenticationFailure)?;
    let p_eph: Option<AffinePoint> = AffinePoint::from_encoded_point(&encoded).into();
    let p_eph = p_eph.ok_or(ReportError::AuthenticationFailure)?;

    let advertised_x: [u8; SCALAR_LEN] = {
        let p = (ProjectivePoint::GENERATOR * **d).to_affine();
        p.to_encoded_point(false).x().expect("not identity").as_slice().try_into().unwrap()
    };
    let shared = diffie_hellman(d, p_eph);
    let (cipher, iv) = cipher(shared.raw_secret_bytes(), &advertised_x);
    let mut plaintext = report.ciphertext;
    cipher
        .decrypt_in_place_detached(Nonce::<U16>::from_slice(&iv), &[], &mut plaintext, Tag::from_slice(&report.tag))
        .map_err(|_| ReportError::AuthenticationFailure)?;
    decode_location(&plaintext).map_err(|_| ReportError::AuthenticationFailure)
}
