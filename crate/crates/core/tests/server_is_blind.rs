//! The report store must work from metadata alone.

const STORE_SRC: &str = include_str!("../src/store.rs");

#[test]
fn store_never_touches_decryption() {
    for needle in ["decrypt", "crate::report::decrypt", "location::", "NonZeroScalar", "AdvertisementKeyPair"] {
        assert!(!STORE_SRC.contains(needle), "store.rs mentions `{needle}`");
    }
}
