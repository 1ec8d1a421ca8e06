//! ANSI X9.63 key derivation with SHA-256.

use sha2_kdf::Sha256;

/// Derives `N` bytes from `secret` and `shared_info`.
///
/// Panics only on an empty secret, which no caller in this crate can produce.
pub fn x963_sha256<const N: usize>(secret: &[u8], shared_info: &[u8]) -> [u8; N] {
    let mut out = [0u8; N];
    ansi_x963_kdf::derive_key_into::<Sha256>(secret, shared_info, &mut out)
        .expect("non-empty secret and output");
    out
}
