//! ANSI X9.63 KDF over SHA-256: T = H(Z || be32(1) || info) || H(Z || be32(2) || info) ...

use sha2::{Digest, Sha256};

pub fn x963_sha256(secret: &[u8], info: &[u8], len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len + 32);
    let mut counter: u32 = 1;
    while out.len() < len {
        let mut block = Vec::with_capacity(secret.len() + 4 + info.len());
        block.extend_from_slice(secret);
        block.extend_from_slice(&counter.to_be_bytes());
        block.extend_from_slice(info);
        out.extend_from_slice(&Sha256::digest(&block));
        counter += 1;
    }
    out.truncate(len);
    out
}

pub fn sha256(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}
