//! Rolling advertisement keys, one equation at a time.

use num_bigint::BigUint;

use crate::{kdf, p224};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleKey {
    pub index: u32,
    pub d: Vec<u8>,
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub key_id: [u8; 32],
}

/// Maps a raw KDF chunk into [1, q-1] as `(x mod (q-1)) + 1`.
pub fn reduce(raw: &[u8]) -> BigUint {
    let q1 = p224::order() - 1u32;
    BigUint::from_bytes_be(raw) % q1 + 1u32
}

/// Keys 1..=count derived from (d0, SK0).
pub fn derive_chain(d0: &[u8], sk0: &[u8; 32], count: u32) -> Vec<OracleKey> {
    let q = p224::order();
    let d0 = BigUint::from_bytes_be(d0);
    let mut sk = sk0.to_vec();
    let mut out = Vec::with_capacity(count as usize);
    for index in 1..=count {
        sk = kdf::x963_sha256(&sk, b"update", 32);
        let uv = kdf::x963_sha256(&sk, b"diversify", 72);
        let u = reduce(&uv[..36]);
        let v = reduce(&uv[36..]);
        let d = (&d0 * u + v) % &q;
        let (x, y) = p224::mul_base(&d).expect("degenerate oracle key");
        let x = p224::to_be(&x, 28);
        out.push(OracleKey {
            index,
            d: p224::to_be(&d, 28),
            key_id: kdf::sha256(&x),
            x,
            y: p224::to_be(&y, 28),
        });
    }
    out
}

/// The i-th key alone.
pub fn derive_one(d0: &[u8], sk0: &[u8; 32], index: u32) -> OracleKey {
    derive_chain(d0, sk0, index).pop().expect("index >= 1")
}
