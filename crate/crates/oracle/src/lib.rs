//! Reference oracles for the findnet test suites.
//!
//! Everything in here is written straight from the textbook definitions and
//! deliberately shares no code with the production crates: big-integer curve
//! arithmetic, a counter-mode hash KDF, a bit-serial GHASH, a quadrature-based
//! geodesic solver and a brute-force density clustering. None of it is fast
//! and none of it is constant time.

pub mod dbscan;
pub mod ecies;
pub mod gcm;
pub mod geodesic;
pub mod geojson;
pub mod kdf;
pub mod keychain;
pub mod p224;
