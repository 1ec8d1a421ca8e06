//! AES-GCM following NIST SP 800-38D step by step: bit-serial GF(2^128)
//! multiplication, arbitrary-length IV through GHASH, 32-bit counter increment.
//! Only the raw AES block permutation is borrowed from the `aes` crate.

use aes::cipher::{generic_array::GenericArray, BlockEncrypt, KeyInit};
use aes::Aes128;

const R: u128 = 0xe1 << 120;

fn gf_mul(x: u128, y: u128) -> u128 {
    let mut z = 0u128;
    let mut v = y;
    for i in 0..128 {
        if (x >> (127 - i)) & 1 == 1 {
            z ^= v;
        }
        v = if v & 1 == 0 { v >> 1 } else { (v >> 1) ^ R };
    }
    z
}

fn ghash(h: u128, data: &[u8]) -> u128 {
    assert_eq!(data.len() % 16, 0);
    data.chunks(16).fold(0u128, |y, chunk| {
        gf_mul(y ^ u128::from_be_bytes(chunk.try_into().unwrap()), h)
    })
}

fn pad16(v: &mut Vec<u8>) {
    while v.len() % 16 != 0 {
        v.push(0);
    }
}

fn block(cipher: &Aes128, input: u128) -> u128 {
    let mut b = GenericArray::from(input.to_be_bytes());
    cipher.encrypt_block(&mut b);
    u128::from_be_bytes(b.into())
}

fn inc32(x: u128) -> u128 {
    let hi = x & !0xffff_ffffu128;
    let lo = (x as u32).wrapping_add(1);
    hi | lo as u128
}

/// Returns (ciphertext, tag) for AES-128-GCM with empty AAD.
pub fn encrypt(key: &[u8; 16], iv: &[u8], plaintext: &[u8]) -> (Vec<u8>, [u8; 16]) {
    let cipher = Aes128::new(GenericArray::from_slice(key));
    let h = block(&cipher, 0);
    let j0 = if iv.len() == 12 {
        let mut b = [0u8; 16];
        b[..12].copy_from_slice(iv);
        b[15] = 1;
        u128::from_be_bytes(b)
    } else {
        let mut s = iv.to_vec();
        pad16(&mut s);
        s.extend_from_slice(&[0u8; 8]);
        s.extend_from_slice(&((iv.len() as u64) * 8).to_be_bytes());
        ghash(h, &s)
    };

    let mut ct = Vec::with_capacity(plaintext.len());
    let mut counter = j0;
    for chunk in plaintext.chunks(16) {
        counter = inc32(counter);
        let ks = block(&cipher, counter).to_be_bytes();
        ct.extend(chunk.iter().zip(ks.iter()).map(|(a, b)| a ^ b));
    }

    let mut s = ct.clone();
    pad16(&mut s);
    s.extend_from_slice(&0u64.to_be_bytes());
    s.extend_from_slice(&((ct.len() as u64) * 8).to_be_bytes());
    let tag = block(&cipher, j0) ^ ghash(h, &s);
    (ct, tag.to_be_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unhex(s: &str) -> Vec<u8> {
        (0..s.len()).step_by(2).map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap()).collect()
    }

    // SP 800-38D / McGrew-Viega test cases 1, 2 and 6 (60-byte IV).
    #[test]
    fn known_answers() {
        let (c, t) = encrypt(&[0; 16], &[0; 12], &[]);
        assert!(c.is_empty());
        assert_eq!(t.to_vec(), unhex("58e2fccefa7e3061367f1d57a4e7455a"));

        let (c, t) = encrypt(&[0; 16], &[0; 12], &[0; 16]);
        assert_eq!(c, unhex("0388dace60b6a392f328c2b971b2fe78"));
        assert_eq!(t.to_vec(), unhex("ab6e47d42cec13bdf53a67b21257bddf"));

        let key: [u8; 16] = unhex("feffe9928665731c6d6a8f9467308308").try_into().unwrap();
        let iv = unhex(
            "9313225df88406e555909c5aff5269aa6a7a9538534f7da1e4c303d2a318a728\
             c3c0c95156809539fcf0e2429a6b525416aedbf5a0de6a57a637b39b",
        );
        let pt = unhex(
            "d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a72\
             1c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b39",
        );
        let (c, _) = encrypt(&key, &iv, &pt);
        assert_eq!(
            c,
            unhex(
                "8ce24998625615b603a033aca13fb894be9112a5c3a211a8ba262a3cca7e2ca7\
                 01e4a9a4fba43c90ccdcb281d48c7c6fd62875d2aca417034c34aee5"
            )
        );
    }
}
