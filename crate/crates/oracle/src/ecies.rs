//! Finder-side report encryption from first principles: ECDH on the
//! big-integer curve, X9.63 KDF keyed by the advertised X coordinate,
//! AES-GCM with the 16-byte derived IV, then the 88-byte layout
//! timestamp(4, BE) | confidence(1) | ephemeral point(57) | ciphertext(10) | tag(16).

use num_bigint::BigUint;

use crate::{gcm, kdf, p224};

pub struct ReportInputs<'a> {
    pub timestamp: u32,
    pub confidence: u8,
    pub ephemeral_scalar: &'a BigUint,
    /// Full advertised point (either Y parity works for the shared X).
    pub advertised: &'a (BigUint, BigUint),
    pub plaintext: &'a [u8; 10],
}

pub fn encrypt(inputs: &ReportInputs<'_>) -> Vec<u8> {
    let (ex, ey) = p224::mul_base(inputs.ephemeral_scalar).expect("nonzero ephemeral");
    let (sx, _) = p224::mul(inputs.ephemeral_scalar, inputs.advertised).expect("nonzero shared");
    let shared = p224::to_be(&sx, 28);
    let adv_x = p224::to_be(&inputs.advertised.0, 28);
    let derived = kdf::x963_sha256(&shared, &adv_x, 32);
    let key: [u8; 16] = derived[..16].try_into().unwrap();
    let (ct, tag) = gcm::encrypt(&key, &derived[16..], inputs.plaintext);

    let mut out = Vec::with_capacity(88);
    out.extend_from_slice(&inputs.timestamp.to_be_bytes());
    out.push(inputs.confidence);
    out.push(0x04);
    out.extend_from_slice(&p224::to_be(&ex, 28));
    out.extend_from_slice(&p224::to_be(&ey, 28));
    out.extend_from_slice(&ct);
    out.extend_from_slice(&tag);
    out
}

/// Location plaintext: lat, lon as round(deg * 1e7) signed BE i32, then accuracy, status.
pub fn location_plaintext(lat: f64, lon: f64, accuracy: u8, status: u8) -> [u8; 10] {
    let mut out = [0u8; 10];
    out[..4].copy_from_slice(&((lat * 1e7).round() as i32).to_be_bytes());
    out[4..8].copy_from_slice(&((lon * 1e7).round() as i32).to_be_bytes());
    out[8] = accuracy;
    out[9] = status;
    out
}
